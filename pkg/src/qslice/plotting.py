"""PNG figures for CLI reports (matplotlib, Agg backend)."""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FLOOR = 1e-18


def residual_figure(records: list, path: Path) -> Path:
    names = [r["name"] for r in records]
    res = [math.log10(max(r["residual"], FLOOR)) for r in records]
    thr = [math.log10(max(r["threshold"], FLOOR)) for r in records]
    colors = ["tab:green" if r["pass"] else "tab:red" for r in records]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.35 * len(names) + 2.0), 4.5))
    x = np.arange(len(names))
    ax.bar(x, [v - math.log10(FLOOR) for v in res], bottom=math.log10(FLOOR), color=colors, label="residual")
    ax.scatter(x, thr, marker="_", s=200, color="black", label="threshold", zorder=3)
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=75, ha="right", fontsize=7)
    ax.set_ylabel("log10 value")
    ax.set_title("Residual vs threshold")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def gram_heatmap(G, path: Path) -> Path:
    G = np.asarray(G, dtype=float)
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(G, cmap="viridis", vmin=0.0, vmax=max(1.0, float(G.max())))
    ax.set_title("|<Phi_m, Phi_n>|")
    ax.set_xlabel("n")
    ax.set_ylabel("m")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def kappa_figure(spectra: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, eigs in sorted(spectra.items()):
        e = np.sort(np.asarray(eigs, dtype=float))
        ax.plot(np.arange(e.size), np.sign(e) * np.log10(1.0 + np.abs(e) / 1e-12), "o-", ms=3, label=name)
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_xlabel("index")
    ax.set_ylabel("sign(l) log10(1 + |l|/1e-12)")
    ax.set_title("Gram eigenvalues")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def write_figures(directory, records: list, plots: dict) -> list:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if records:
        written.append(residual_figure(records, out / "residual_vs_threshold.png"))
    if "onb_gram" in plots:
        written.append(gram_heatmap(plots["onb_gram"], out / "onb_gram.png"))
    if plots.get("kappa_spectra"):
        written.append(kappa_figure(plots["kappa_spectra"], out / "kappa_eigenvalues.png"))
    return written
