"""``qslice`` command-line front end.

Every command produces a JSON report ``{command, version, seed, tol, records,
summary, values, wall_time}``; ``wall_time`` is the only field that depends on
the clock and is ``null`` under ``--no-timing``.

Exit codes: 0 all checks pass, 1 some check fails, 2 malformed input (no report
is written), 3 internal error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import blaschke as bl
from . import hardy as hd
from . import suites
from .errors import DomainError, QSliceError, SingularBlock
from .kernels import k_eval, pg_transform
from .qlinalg import QMatrix, qdiff, signature
from .quat import Quaternion, random_halfspace_points
from .realization import (
    COFData,
    GPBackwardShift,
    PairModel,
    SchurRealization,
    cof_eval,
    cof_identity_residual,
    coisometry_residual,
    gp_backward_shift_eval,
    gp_real_part,
    pair_phi_eval,
    pair_phi_inverse_eval,
    schur_eval,
    schur_kernel_closed,
    schur_real_axis,
)

DEFAULT_SEED = 0xC0FFEE
COMMANDS = ("eval", "kernel-check", "blaschke", "realize", "pg", "kappa", "hardy-check", "selftest")
# fixed stream index per suite, so one suite's draws never shift another's
STREAMS = {"linalg": 1, "kernel": 2, "star": 3, "cauchy": 4, "blaschke": 5, "realize": 6, "pg": 7, "kappa": 8, "hardy": 9}


class InputError(Exception):
    """Malformed user input; maps to exit status 2."""


@dataclass
class RunConfig:
    command: str
    seed: int = DEFAULT_SEED
    tol: float | None = None
    out: str | None = None
    csv: str | None = None
    figures: str | None = None
    timing: bool = True
    args: argparse.Namespace | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.tol is not None and not self.tol > 0:
            raise InputError("--tol must be positive")

    def rng(self, stream: str) -> np.random.Generator:
        return np.random.default_rng([self.seed & 0xFFFFFFFFFFFFFFFF, STREAMS[stream]])


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

def _quat_arg(text: str, name: str) -> Quaternion:
    try:
        val = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{name}: not valid JSON ({exc.msg})") from exc
    try:
        return Quaternion.of(val)
    except (TypeError, ValueError, DomainError) as exc:
        raise InputError(f"{name}: expected a quaternion [w, x, y, z]") from exc


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno} ({exc.msg})") from exc


def _parse(builder, obj, what: str):
    try:
        return builder(obj)
    except (DomainError, KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"{what}: {exc}") from exc


def _qjson(v):
    if isinstance(v, QMatrix):
        return v.item().to_json() if v.shape == (1, 1) else v.to_json()
    return Quaternion.of(v).to_json()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_eval(cfg: RunConfig) -> suites.SuiteResult:
    a = cfg.args
    out = suites.SuiteResult()
    p = _quat_arg(a.p, "--p")
    model = a.model
    if model in ("blaschke", "sphere", "star-inverse"):
        if a.a is None:
            raise InputError(f"--model {model} needs --a")
        c = _quat_arg(a.a, "--a")
        if model == "blaschke":
            val = _parse(bl.BlaschkeFactor, c, "--a")(p)
        elif model == "sphere":
            val = _parse(bl.SphereFactor, c, "--a")(p)
        else:
            val = _parse(hd.star_inverse_linear, c, "--a")(p)
    elif model == "onb":
        val = hd.onb_eval(a.n, p)
    elif model == "kernel":
        if a.q is None:
            raise InputError("--model kernel needs --q")
        val = k_eval(p, _quat_arg(a.q, "--q"))
    else:  # realization
        if a.input is None:
            raise InputError("--model realization needs --input")
        val = _realization_evaluator(_load_json(a.input))(p)
    out.values["model"] = model
    out.values["p"] = p.to_json()
    out.values["value"] = _qjson(val)
    arr = np.asarray(val.to_array() if isinstance(val, QMatrix) else tuple(val), dtype=float)
    out.add("evaluation-finite", 0.0 if np.all(np.isfinite(arr)) else math.inf, 0.0, exact=True)
    return out


def _realization_evaluator(obj):
    kind = obj.get("type") if isinstance(obj, dict) else None
    if kind == "schur":
        r = _parse(SchurRealization.from_json, obj, "schur realization")
        return lambda p: schur_eval(r, p)
    if kind == "cof":
        d = _parse(COFData.from_json, obj, "COF data")
        return lambda p: cof_eval(d, p)
    if kind == "gp":
        d = _parse(GPBackwardShift.from_json, obj, "GP quadruple")
        return lambda p: gp_backward_shift_eval(d, p)
    if kind == "pair":
        m = _parse(PairModel.from_json, obj, "pair model")
        return lambda p: pair_phi_eval(m, p)
    raise InputError("realization JSON needs \"type\" in {schur, cof, gp, pair}")


def cmd_kernel_check(cfg: RunConfig) -> suites.SuiteResult:
    return suites.kernel_suite(cfg.rng("kernel"), n_pairs=cfg.args.pairs)


def cmd_blaschke(cfg: RunConfig) -> suites.SuiteResult:
    if cfg.args.input is None:
        return suites.blaschke_suite(cfg.rng("blaschke"))
    zs = _parse(bl.ZeroSet.from_json, _load_json(cfg.args.input), "zero set")
    out = suites.SuiteResult()
    factors = bl.prescribe_zeros(zs)
    out.values["factors"] = [f.to_json() for f in factors]
    rng = cfg.rng("blaschke")
    vanish, order = 0.0, 0.0
    for a, mu in zs.points:
        vanish = max(vanish, abs(bl.product_eval(factors, a)))
        for k in range(1, mu):
            order = max(order, abs(bl.slice_taylor_coefficient(factors, a, k)))
    for c, _ in zs.spheres:
        for _ in range(5):
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            pt = Quaternion(c.w, *(u * c.imag_norm()))
            vanish = max(vanish, abs(bl.product_eval(factors, pt)))
    out.add("prescribed-zeros-vanish", vanish, 1e-9)
    out.add("prescribed-zeros-order", order, 1e-9)
    return out


def cmd_realize(cfg: RunConfig) -> suites.SuiteResult:
    if cfg.args.input is None:
        return suites.realization_suite(cfg.rng("realize"), instances=cfg.args.instances)
    obj = _load_json(cfg.args.input)
    kind = obj.get("type") if isinstance(obj, dict) else None
    rng = cfg.rng("realize")
    out = suites.SuiteResult()
    if kind == "schur":
        r = _parse(SchurRealization.from_json, obj, "schur realization")
        out.add("coisometry", coisometry_residual(r), 1e-12)
        xs = r.x0 * (1.0 + np.linspace(-0.4, 0.4, 8))
        gap = 0.0
        for x in xs:
            for y in xs:
                Sx, Sy = schur_real_axis(r, x), schur_real_axis(r, y)
                lhs = (r.J2 - Sx @ r.J1 @ Sy.H) * (1.0 / (x + y))
                gap = max(gap, qdiff(lhs, schur_kernel_closed(r, x, y)))
        out.add("step9-factorization", gap, 1e-10)
    elif kind == "cof":
        d = _parse(COFData.from_json, obj, "COF data")
        P, Q = random_halfspace_points(rng, 100), random_halfspace_points(rng, 100)
        res = max(cof_identity_residual(d, Quaternion(*p), Quaternion(*q)) for p, q in zip(P, Q))
        out.add("cof-kernel-identity", res, 1e-11)
    elif kind == "gp":
        d = _parse(GPBackwardShift.from_json, obj, "GP quadruple")
        X = gp_real_part(d)
        out.add("gp-real-condition-positive-squares", signature(X).nu_plus, 0, exact=True)
    elif kind == "pair":
        m = _parse(PairModel.from_json, obj, "pair model")
        gap = max(
            qdiff(pair_phi_eval(m, x) @ pair_phi_inverse_eval(m, x), QMatrix.eye(m.J.rows)) for x in (0.3, 1.0, 2.5)
        )
        out.add("pair-model-star-inverse", gap, 1e-10)
    else:
        raise InputError("realization JSON needs \"type\" in {schur, cof, gp, pair}")
    return out


def cmd_pg(cfg: RunConfig) -> suites.SuiteResult:
    if cfg.args.input is None:
        return suites.pg_suite(cfg.rng("pg"), instances=cfg.args.instances)
    obj = _load_json(cfg.args.input)
    S = _parse(lambda o: QMatrix.from_json(o["S"]), obj, "PG input")
    split = _parse(lambda o: tuple(int(v) for v in o["split"]), obj, "PG split")
    if len(split) != 2:
        raise InputError("split must be [r1, c1]")
    out = suites.SuiteResult()
    try:
        sigma = _parse(lambda s: pg_transform(s, split), S, "PG transform")
    except SingularBlock as exc:
        raise InputError(f"PG transform: {exc}") from exc
    out.values["sigma"] = sigma.to_json()
    out.add("pg-involution", qdiff(pg_transform(sigma, split), S), 1e-11)
    return out


def cmd_kappa(cfg: RunConfig) -> suites.SuiteResult:
    a = cfg.args
    return suites.kappa_suite(cfg.rng("kappa"), cfg.seed, trials=a.trials, points=a.points)


def _quadrature(a) -> hd.QuadratureSpec:
    try:
        return hd.QuadratureSpec(a.cutoff, a.nodes, a.scheme)
    except DomainError as exc:
        raise InputError(str(exc)) from exc


def cmd_hardy(cfg: RunConfig) -> suites.SuiteResult:
    a = cfg.args
    parts = ("reproducing", "onb", "isometry", "norms") if a.suite == "all" else (a.suite,)
    return suites.hardy_suite(cfg.rng("hardy"), _quadrature(a), parts)


def cmd_selftest(cfg: RunConfig) -> suites.SuiteResult:
    out = suites.SuiteResult()
    out.extend(suites.linalg_suite(cfg.rng("linalg"), count=60))
    out.extend(suites.kernel_suite(cfg.rng("kernel"), n_pairs=2000))
    out.extend(suites.star_suite(cfg.rng("star"), pairs=10, points=200))
    out.extend(suites.cauchy_suite(cfg.rng("cauchy"), trials=4))
    out.extend(suites.blaschke_suite(cfg.rng("blaschke"), samples=40))
    out.extend(suites.realization_suite(cfg.rng("realize"), instances=4, pairs=10, grid=6))
    out.extend(suites.pg_suite(cfg.rng("pg"), instances=8))
    out.extend(suites.kappa_suite(cfg.rng("kappa"), cfg.seed, trials=3, points=12))
    out.extend(suites.hardy_suite(cfg.rng("hardy"), hd.ONB_QUADRATURE))
    return out


HANDLERS = {
    "eval": cmd_eval,
    "kernel-check": cmd_kernel_check,
    "blaschke": cmd_blaschke,
    "realize": cmd_realize,
    "pg": cmd_pg,
    "kappa": cmd_kappa,
    "hardy-check": cmd_hardy,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _apply_tol(checks: list, tol: float | None) -> list:
    if tol is None:
        return checks
    return [c if c.exact else suites.Check(c.name, c.residual, tol, c.exact) for c in checks]


def _clean(obj):
    """Make values JSON-safe: non-finite floats become strings."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def build_report(cfg: RunConfig, result: suites.SuiteResult, wall: float | None) -> dict:
    checks = _apply_tol(result.checks, cfg.tol)
    records = [c.record() for c in checks]
    passed = sum(r["pass"] for r in records)
    return _clean(
        {
            "command": cfg.command,
            "version": __version__,
            "seed": cfg.seed,
            "tol": cfg.tol,
            "records": records,
            "summary": {"total": len(records), "passed": passed, "failed": len(records) - passed},
            "values": result.values,
            "wall_time": wall,
        }
    )


def write_csv(path: str, records: list) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "residual", "threshold", "pass"])
        for r in records:
            w.writerow([r["name"], repr(r["residual"]), repr(r["threshold"]), str(r["pass"]).lower()])


def run(cfg: RunConfig) -> tuple[dict, int]:
    start = time.perf_counter()
    result = HANDLERS[cfg.command](cfg)
    wall = round(time.perf_counter() - start, 3) if cfg.timing else None
    report = build_report(cfg, result, wall)
    text = json.dumps(report, indent=2) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if cfg.csv:
        write_csv(cfg.csv, report["records"])
    if cfg.figures:
        from .plotting import write_figures

        write_figures(cfg.figures, report["records"], result.plots)
    return report, 0 if report["summary"]["failed"] == 0 else 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None, help="64-bit seed (default 0xC0FFEE or $QSLICE_SEED)")
    common.add_argument("--tol", type=float, default=None, help="override every tolerance threshold")
    common.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    common.add_argument("--csv", default=None, help="also write the records as CSV")
    common.add_argument("--figures", default=None, metavar="DIR", help="write PNG figures into DIR")
    common.add_argument("--no-timing", action="store_true", help="report wall_time as null")

    parser = argparse.ArgumentParser(prog="qslice", description="Slice-regular function toolkit checks.")
    parser.add_argument("--version", action="version", version=f"qslice {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a function at a point")
    p.add_argument("--model", required=True, choices=["blaschke", "sphere", "star-inverse", "onb", "kernel", "realization"])
    p.add_argument("--p", required=True, help="point as JSON [w,x,y,z]")
    p.add_argument("--a", default=None, help="parameter quaternion as JSON")
    p.add_argument("--q", default=None, help="second kernel argument as JSON")
    p.add_argument("--n", type=int, default=0, help="basis index for --model onb")
    p.add_argument("--input", default=None, help="realization JSON file")

    p = sub.add_parser("kernel-check", parents=[common], help="Hardy kernel identities")
    p.add_argument("--pairs", type=int, default=10_000)

    p = sub.add_parser("blaschke", parents=[common], help="Blaschke factors and prescribed zeros")
    p.add_argument("--input", default=None, help="zero-set JSON file")

    p = sub.add_parser("realize", parents=[common], help="realization identities")
    p.add_argument("--input", default=None, help="realization JSON file")
    p.add_argument("--instances", type=int, default=20)

    p = sub.add_parser("pg", parents=[common], help="Potapov-Ginzburg transform")
    p.add_argument("--input", default=None, help="JSON with S and split")
    p.add_argument("--instances", type=int, default=20)

    p = sub.add_parser("kappa", parents=[common], help="negative-squares estimation")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--points", type=int, default=40)

    p = sub.add_parser("hardy-check", parents=[common], help="Hardy space quadrature suite")
    p.add_argument("--suite", choices=["reproducing", "onb", "isometry", "norms", "all"], default="all")
    p.add_argument("--cutoff", type=float, default=hd.DEFAULT_QUADRATURE.cutoff)
    p.add_argument("--nodes", type=int, default=hd.DEFAULT_QUADRATURE.nodes)
    p.add_argument("--scheme", choices=list(hd.SCHEMES), default=hd.DEFAULT_QUADRATURE.scheme)

    sub.add_parser("selftest", parents=[common], help="run every built-in identity suite")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    seed = ns.seed
    if seed is None:
        env = os.environ.get("QSLICE_SEED")
        if env:
            try:
                seed = int(env, 0)
            except ValueError as exc:
                raise InputError(f"QSLICE_SEED is not an integer: {env!r}") from exc
        else:
            seed = DEFAULT_SEED
    return RunConfig(ns.command, seed, ns.tol, ns.out, ns.csv, ns.figures, not ns.no_timing, ns)


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        _, status = run(cfg)
        return status
    except InputError as exc:
        print(f"qslice: input error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"qslice: input outside the domain: {exc}", file=sys.stderr)
        return 2
    except QSliceError as exc:
        print(f"qslice: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - anything else is a bug, reported as such
        print(f"qslice: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
