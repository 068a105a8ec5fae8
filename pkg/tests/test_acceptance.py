"""Acceptance criteria 1-14, each at its stated size and tolerance.

Every test prints one ``PASS``/``FAIL`` line (visible under ``pytest -v``)
and then asserts, so a failing criterion is both reported and counted.
"""
import json
import shutil
import subprocess
import sys
import time

import numpy as np
import pytest

from qslice import blaschke as bl
from qslice import suites
from qslice.kernels import (
    GramSpec,
    KernelSpec,
    gram_eigenvalues,
    gram_matrix,
    k_eval_alt_many,
    k_eval_many,
    k_identity_residual_many,
)
from qslice.qlinalg import QMatrix, chi_embed, qdiff
from qslice.quat import Quaternion, random_halfspace_points, random_unit_imaginary
from qslice.realization import (
    blaschke_realization,
    cof_function,
    cof_identity_residual,
    coisometry_residual,
    example_gp_star_inverse,
    gp_backward_shift_eval,
    gp_real_part,
    random_cof,
    schur_eval,
)
from qslice.slicefn import star_fold

SEED = 20240607


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, rows: list) -> bool:
        """``rows`` holds ``(label, value, bound)``; ``value <= bound`` passes."""
        ok = all(v <= b for _, v, b in rows)
        detail = "; ".join(f"{label}={v:.3g} (<= {b:.3g})" for label, v, b in rows)
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {title}: {detail}")
        return ok

    return emit


def suite_rows(result: suites.SuiteResult) -> list:
    return [(c.name, c.residual, c.threshold) for c in result.checks]


def test_criterion_01_kernel_identity(report):
    rng = np.random.default_rng([SEED, 1])
    P, Q = random_halfspace_points(rng, 10_000), random_halfspace_points(rng, 10_000)
    t0 = time.perf_counter()
    res = float(k_identity_residual_many(P, Q).max())
    elapsed = time.perf_counter() - t0
    assert report(1, "pk + k conj(q) = 1", [("max residual", res, 1e-12), ("seconds", elapsed, 1.0)])


def test_criterion_02_kernel_closed_forms(report):
    rng = np.random.default_rng([SEED, 2])
    P, Q = random_halfspace_points(rng, 10_000), random_halfspace_points(rng, 10_000)
    gap = float(np.abs(k_eval_many(P, Q) - k_eval_alt_many(P, Q)).max())
    restriction = next(c for c in suites.kernel_suite(rng, 10_000).checks if c.name == "kernel-slice-restriction")
    assert report(2, "two kernel forms and slice restriction", [
        ("form gap", gap, 1e-12),
        ("1/(z + conj w) gap", restriction.residual, 1e-13),
    ])


def test_criterion_03_chi_and_signature(report):
    rng = np.random.default_rng([SEED, 3])
    t0 = time.perf_counter()
    res = suites.linalg_suite(rng, count=200, max_dim=12)
    hom = 0.0
    for _ in range(200):
        m, n, p = (int(v) for v in rng.integers(1, 13, size=3))
        A, B = QMatrix.random(rng, m, n), QMatrix.random(rng, n, p)
        hom = max(hom, float(np.abs(chi_embed(A @ B) - chi_embed(A) @ chi_embed(B)).max()))
    elapsed = time.perf_counter() - t0
    rows = suite_rows(res) + [("chi homomorphism", hom, 1e-12), ("seconds", elapsed, 5.0)]
    assert report(3, "chi embedding and signature doubling", rows)


def test_criterion_04_star_dual_oracle(report):
    rng = np.random.default_rng([SEED, 4])
    res = suites.star_suite(rng, pairs=50, points=1000, max_degree=8)
    i, j, k = Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)
    worked = abs(star_fold([lambda p: p - i, lambda p: p - j], j).value - k * 2.0)
    rows = suite_rows(res) + [("(p-i)*(p-j) at j vs 2k", worked, 1e-14)]
    assert report(4, "star product two-oracle agreement", rows)


def test_criterion_05_blaschke(report):
    rng = np.random.default_rng([SEED, 5])
    A = [Quaternion(*a) for a in random_halfspace_points(rng, 100)]
    zero = max(abs(bl.BlaschkeFactor(a)(a)) for a in A)
    sphere = 0.0
    for _ in range(10):
        c = A[0]
        sphere = max(sphere, abs(bl.SphereFactor(c)(Quaternion(c.w) + random_unit_imaginary(rng) * c.imag_norm())))
    modulus = max(bl.boundary_modulus_check(bl.BlaschkeFactor(a), 10, s) for s, a in enumerate(A))
    pair = 0.0
    for a, p in zip(A, random_halfspace_points(rng, 100)):
        p = Quaternion(*p)
        both = bl.product_eval([bl.BlaschkeFactor(a), bl.BlaschkeFactor(a.conj())], p)
        pair = max(pair, abs(bl.SphereFactor(a)(p) - both))
    assert report(5, "Blaschke factors", [
        ("b_a(a)", zero, 1e-13),
        ("sphere factor on sphere", sphere, 1e-13),
        ("boundary modulus (10^3 samples)", modulus, 1e-12),
        ("b_[a] - b_a * b_conj(a)", pair, 1e-12),
    ])


def test_criterion_06_blaschke_realization(report):
    rng = np.random.default_rng([SEED, 6])
    r1 = blaschke_realization(1.0)
    exact = qdiff(r1.operator_matrix, QMatrix.real([[0.0, 1.0], [-1.0, 0.0]]))
    a = Quaternion(1.0, 1.0, 0.0, 0.0)
    ra = blaschke_realization(a)
    f = bl.BlaschkeFactor(a)
    values = max(abs(schur_eval(ra, Quaternion(*p)).item() - f(Quaternion(*p))) for p in random_halfspace_points(rng, 1000))
    unitary = max(coisometry_residual(blaschke_realization(Quaternion(*b))) for b in random_halfspace_points(rng, 20))
    assert report(6, "unitary Blaschke realization", [
        ("matrix at a=1 vs [[0,1],[-1,0]]", exact, 0.0),
        ("unitarity residual", max(unitary, coisometry_residual(ra)), 1e-12),
        ("schur_eval vs blaschke_eval (10^3 pts)", values, 1e-10),
    ])


def test_criterion_07_cof(report):
    rng = np.random.default_rng([SEED, 7])
    worst = 0.0
    for _ in range(20):
        d = random_cof(rng, int(rng.integers(1, 7)), int(rng.integers(1, 3)))
        P, Q = random_halfspace_points(rng, 1000), random_halfspace_points(rng, 1000)
        worst = max(worst, max(cof_identity_residual(d, Quaternion(*p), Quaternion(*q)) for p, q in zip(P, Q)))
    d = random_cof(rng, 4, 2, 1)
    spec = KernelSpec.schur(cof_function(d), d.J, d.J)
    g = GramSpec(tuple(Quaternion(*p) for p in random_halfspace_points(rng, 40)), tuple(QMatrix.random(rng, 2, 1) for _ in range(40)))
    neg = max(0.0, -float(gram_eigenvalues(gram_matrix(spec, g)).min()))
    assert report(7, "characteristic operator function", [
        ("kernel identity (20 x 10^3 pairs)", worst, 1e-11),
        ("-min Gram eigenvalue (40 pts)", neg, 1e-8),
    ])


def test_criterion_08_step9(report):
    rng = np.random.default_rng([SEED, 8])
    res = suites.realization_suite(rng, instances=20, pairs=50, grid=20)
    rows = [(c.name, c.residual, c.threshold) for c in res.checks if c.name == "step9-factorization"]
    assert report(8, "realization kernel factorization on a 20x20 grid", rows)


def test_criterion_09_potapov_ginzburg(report):
    rng = np.random.default_rng([SEED, 9])
    assert report(9, "Potapov-Ginzburg transform", suite_rows(suites.pg_suite(rng, instances=20)))


def test_criterion_10_generalized_positive(report):
    rng = np.random.default_rng([SEED, 10])
    i = Quaternion(0, 1, 0, 0)
    ex = example_gp_star_inverse(i)
    gap = 0.0
    for p in random_halfspace_points(rng, 1000):
        p = Quaternion(*p)
        gap = max(gap, abs(gp_backward_shift_eval(ex, p).item() - (p * p + 1.0).inverse() * (p - i)))
    res = suites.realization_suite(rng, instances=20, pairs=50, grid=2)
    keep = {"pair-model-star-inverse", "kphi-gram-psd", "r1r1-identity"}
    rows = [("(p^2+1)^-1 (p-i) at 10^3 pts", gap, 1e-12), ("Re condition", gp_real_part(ex).max_abs(), 0.0)]
    rows += [(c.name, c.residual, c.threshold) for c in res.checks if c.name in keep]
    assert report(10, "generalized positive functions", rows)


def test_criterion_11_hardy(report):
    rng = np.random.default_rng([SEED, 11])
    t0 = time.perf_counter()
    res = suites.hardy_suite(rng)
    elapsed = time.perf_counter() - t0
    ratios = res.values["norm_ratios"]
    rows = suite_rows(res) + [
        ("ratio below 0.5", max(0.0, 0.5 - min(ratios)), 0.0),
        ("ratio above 2", max(0.0, max(ratios) - 2.0), 0.0),
        ("seconds", elapsed, 60.0),
    ]
    assert len(ratios) == 20
    assert report(11, "Hardy space quadrature", rows)


def test_criterion_12_kappa(report):
    rng = np.random.default_rng([SEED, 12])
    res = suites.kappa_suite(rng, SEED, trials=20, points=40)
    hats = ", ".join(f"{k[len('kappa_hat_'):]}={v}" for k, v in sorted(res.values.items()) if k.startswith("kappa_hat_"))
    # residuals are |kappa_hat - expected|
    assert report(12, f"negative squares ({hats})", suite_rows(res))


def test_criterion_13_cauchy(report):
    rng = np.random.default_rng([SEED, 13])
    assert report(13, "Cauchy formula", suite_rows(suites.cauchy_suite(rng, trials=10)))


def _selftest_command() -> list:
    exe = shutil.which("qslice")
    return [exe] if exe else [sys.executable, "-m", "qslice.cli"]


def test_criterion_14_determinism(report, tmp_path):
    paths = [tmp_path / "first.json", tmp_path / "second.json"]
    codes = []
    for path in paths:
        proc = subprocess.run(_selftest_command() + ["selftest", "--seed", "7", "--out", str(path)], capture_output=True)
        codes.append(proc.returncode)
    # wall_time is the only run-dependent field; compare the canonical bytes without it
    blobs = []
    for path in paths:
        obj = json.loads(path.read_text())
        obj.pop("wall_time")
        blobs.append(json.dumps(obj, indent=2, sort_keys=True).encode())
    timed_equal = blobs[0] == blobs[1]
    untimed = []
    for name in ("third.json", "fourth.json"):
        path = tmp_path / name
        subprocess.run(_selftest_command() + ["selftest", "--seed", "7", "--no-timing", "--out", str(path)], check=True)
        untimed.append(path.read_bytes())
    assert report(14, "selftest reports are reproducible", [
        ("exit codes nonzero", float(max(codes)), 0.0),
        ("report mismatch (wall_time removed)", 0.0 if timed_equal else 1.0, 0.0),
        ("byte mismatch (--no-timing)", 0.0 if untimed[0] == untimed[1] else 1.0, 0.0),
    ])
