"""Verification suites shared by the command-line front end.

Each suite takes a seeded generator and returns ``SuiteResult``: a list of
``Check`` records plus optional plot data.  Counting checks (signatures,
negative squares) are marked ``exact`` and keep a zero threshold when a global
tolerance override is in force.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import blaschke as bl
from . import hardy as hd
from .kernels import (
    GramSpec,
    KernelSpec,
    congruence_kappa_check,
    estimate_negative_squares,
    gram_eigenvalues,
    gram_matrix,
    k_eval_alt_many,
    k_eval_many,
    k_identity_residual_many,
    pg_transform,
    perlette_residual,
)
from .qlinalg import (
    QMatrix,
    qdiff,
    random_unitary,
    signature_and_spectrum,
    signature_matrix,
)
from .quat import Quaternion, random_halfspace_points, random_unit_imaginary
from .realization import (
    blaschke_realization,
    coisometry_residual,
    cof_function,
    cof_identity_residual,
    example_gp_star_inverse,
    gp_backward_shift_eval,
    gp_real_part,
    pair_function,
    pair_phi_eval,
    pair_phi_inverse_eval,
    r1r1_residual,
    random_cof,
    random_pair_model,
    random_schur_realization,
    schur_eval,
    schur_kernel_closed,
    schur_real_axis,
)
from .slicefn import (
    PowerSeries,
    SliceFunction,
    cauchy_eval,
    ps_eval_scalar_many,
    ps_star_mul,
    series_restriction,
    star_fold,
    star_fold_many,
)


@dataclass
class Check:
    name: str
    residual: float
    threshold: float
    exact: bool = False

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.threshold)

    def record(self) -> dict:
        return {
            "name": self.name,
            "residual": float(self.residual),
            "threshold": float(self.threshold),
            "pass": self.passed,
        }


@dataclass
class SuiteResult:
    checks: list = field(default_factory=list)
    plots: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def add(self, name: str, residual: float, threshold: float, exact: bool = False) -> None:
        self.checks.append(Check(name, float(residual), float(threshold), exact))

    def extend(self, other: "SuiteResult") -> None:
        self.checks.extend(other.checks)
        self.plots.update(other.plots)
        self.values.update(other.values)


def _points(rng, n) -> np.ndarray:
    return random_halfspace_points(rng, n)


# ---------------------------------------------------------------------------

def linalg_suite(rng, count: int = 200, max_dim: int = 12) -> SuiteResult:
    """Signature recovery for random ``U D U^*`` and the eigenvalue pairing of chi."""
    out = SuiteResult()
    wrong, pair_gap = 0, 0.0
    for _ in range(count):
        n = int(rng.integers(1, max_dim + 1))
        npos = int(rng.integers(0, n + 1))
        nneg = int(rng.integers(0, n - npos + 1))
        d = np.concatenate([rng.uniform(0.5, 3.0, npos), -rng.uniform(0.5, 3.0, nneg), np.zeros(n - npos - nneg)])
        U = random_unitary(rng, n)
        A = U @ QMatrix.real(np.diag(d)) @ U.H
        A = (A + A.H) * 0.5
        sig, eigs = signature_and_spectrum(A)
        if tuple(sig) != (npos, nneg, n - npos - nneg):
            wrong += 1
        scale = max(1.0, float(np.abs(eigs).max()))
        pair_gap = max(pair_gap, float(np.abs(eigs[0::2] - eigs[1::2]).max()) / scale)
    out.add("signature-recovery-failures", wrong, 0, exact=True)
    out.add("chi-eigenvalue-pairing", pair_gap, 1e-12)
    return out


def kernel_suite(rng, n_pairs: int = 10_000) -> SuiteResult:
    out = SuiteResult()
    P, Q = _points(rng, n_pairs), _points(rng, n_pairs)
    out.add("kernel-identity", float(k_identity_residual_many(P, Q).max()), 1e-12)
    gap = np.abs(k_eval_many(P, Q) - k_eval_alt_many(P, Q)).max()
    out.add("kernel-closed-forms", float(gap), 1e-12)
    # common slice: k(z, w) = 1/(z + conj w)
    unit = np.asarray(random_unit_imaginary(rng), float)
    z = rng.uniform(0.1, 3.0, n_pairs) + 1j * rng.uniform(-3.0, 3.0, n_pairs)
    w = rng.uniform(0.1, 3.0, n_pairs) + 1j * rng.uniform(-3.0, 3.0, n_pairs)

    def lift(c):
        arr = np.outer(c.imag, unit)
        arr[:, 0] = c.real
        return arr

    expect = 1.0 / (z + w.conj())
    err = np.abs(k_eval_many(lift(z), lift(w)) - lift(expect)).max()
    out.add("kernel-slice-restriction", float(err), 1e-13)
    return out


def star_suite(rng, pairs: int = 50, points: int = 1000, max_degree: int = 8) -> SuiteResult:
    """Coefficient star product against the pointwise twisting rule."""
    out = SuiteResult()
    P = _points(rng, points) * 0.5  # keep |p| moderate so degree-16 products stay well scaled
    worst = 0.0
    for _ in range(pairs):
        f = PowerSeries.scalar([Quaternion(*c) for c in rng.normal(size=(int(rng.integers(0, max_degree + 1)) + 1, 4))])
        g = PowerSeries.scalar([Quaternion(*c) for c in rng.normal(size=(int(rng.integers(0, max_degree + 1)) + 1, 4))])
        fg = ps_star_mul(f, g).scalar_coeffs()
        direct = ps_eval_scalar_many(fg, P)
        fc, gc = f.scalar_coeffs(), g.scalar_coeffs()
        fold = star_fold_many([lambda X: ps_eval_scalar_many(fc, X), lambda X: ps_eval_scalar_many(gc, X)], P)
        scale = max(1.0, float(np.abs(direct).max()))
        worst = max(worst, float(np.abs(direct - fold).max()) / scale)
    out.add("star-product-dual-oracle", worst, 1e-9)
    i, j, k = Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)
    val = star_fold([lambda p: p - i, lambda p: p - j], j).value
    out.add("star-product-worked-value", abs(val - k * 2.0), 1e-14)
    return out


def cauchy_suite(rng, trials: int = 10) -> SuiteResult:
    out = SuiteResult()
    worst, spread = 0.0, 0.0
    for _ in range(trials):
        coeffs = [Quaternion(*c) for c in rng.normal(size=(int(rng.integers(1, 6)), 4))]
        f = PowerSeries.scalar(coeffs)
        p = Quaternion(*(rng.normal(size=4) * 0.5))
        exact = f(p)
        vals = []
        for I in (Quaternion(0, 1, 0, 0), random_unit_imaginary(rng)):
            v = cauchy_eval(series_restriction(f, I), p, radius=2.0 + abs(p), nodes=256)
            worst = max(worst, qdiff(v, exact))
            vals.append(v)
        spread = max(spread, qdiff(vals[0], vals[1]))
    out.add("cauchy-reproduction", worst, 1e-10)
    out.add("cauchy-slice-independence", spread, 1e-9)
    return out


def blaschke_suite(rng, samples: int = 100) -> SuiteResult:
    out = SuiteResult()
    A = _points(rng, samples)
    out.add("blaschke-zero", max(abs(bl.BlaschkeFactor(Quaternion(*a))(Quaternion(*a))) for a in A), 1e-13)
    worst = 0.0
    for a in A[:10]:
        a = Quaternion(*a)
        on_sphere = Quaternion(a.w) + random_unit_imaginary(rng) * a.imag_norm()
        worst = max(worst, abs(bl.SphereFactor(a)(on_sphere)))
    out.add("sphere-factor-zero", worst, 1e-13)
    out.add(
        "boundary-modulus",
        max(bl.boundary_modulus_check(bl.BlaschkeFactor(Quaternion(*a)), 10, int(rng.integers(2**31))) for a in A),
        1e-12,
    )
    gap = 0.0
    for a, p in zip(A[:50], _points(rng, 50)):
        a, p = Quaternion(*a), Quaternion(*p)
        gap = max(gap, abs(bl.SphereFactor(a)(p) - bl.product_eval([bl.BlaschkeFactor(a), bl.BlaschkeFactor(a.conj())], p)))
    out.add("sphere-equals-pair-product", gap, 1e-12)
    a1, a2, c = Quaternion(1.0, 0.5, 0.2, 0.0), Quaternion(0.6, 0.0, -0.3, 0.8), Quaternion(2.0, 1.0, 0.0, 0.0)
    zs = bl.ZeroSet(((a1, 2), (a2, 1)), ((c, 1),))
    factors = bl.prescribe_zeros(zs)
    on_c = Quaternion(c.w) + random_unit_imaginary(rng) * c.imag_norm()
    vanish = max(abs(bl.product_eval(factors, z)) for z in (a1, a2, on_c))
    out.add("prescribed-zeros-vanish", vanish, 1e-9)
    out.add("prescribed-zeros-order", abs(bl.slice_taylor_coefficient(factors, a1, 1)), 1e-9)
    return out


def realization_suite(rng, instances: int = 20, pairs: int = 50, grid: int = 20) -> SuiteResult:
    out = SuiteResult()
    r1 = blaschke_realization(1.0)
    exact = QMatrix.real([[0.0, 1.0], [-1.0, 0.0]])
    out.add("blaschke-realization-at-1", qdiff(r1.operator_matrix, exact), 1e-12)
    worst_u, worst_v = 0.0, 0.0
    for a in _points(rng, 10):
        r = blaschke_realization(Quaternion(*a))
        worst_u = max(worst_u, coisometry_residual(r))
        f = bl.BlaschkeFactor(Quaternion(*a))
        for p in _points(rng, pairs):
            p = Quaternion(*p)
            worst_v = max(worst_v, abs(schur_eval(r, p).item() - f(p)))
    out.add("blaschke-realization-unitary", worst_u, 1e-12)
    out.add("blaschke-realization-values", worst_v, 1e-10)

    step9 = 0.0
    for t in range(instances):
        n, h = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        nneg = int(t % 2)
        P = signature_matrix(n - min(nneg, n - 1), min(nneg, n - 1)) if n > 1 else None
        r = random_schur_realization(rng, n, h, state_metric=P)
        xs = r.x0 * (1.0 + np.linspace(-0.4, 0.4, grid))
        Sx = [schur_real_axis(r, x) for x in xs]
        for u, x in enumerate(xs):
            for v, y in enumerate(xs):
                lhs = (r.J2 - Sx[u] @ r.J1 @ Sx[v].H) * (1.0 / (x + y))
                step9 = max(step9, qdiff(lhs, schur_kernel_closed(r, x, y)))
    out.add("step9-factorization", step9, 1e-10)

    cof, psd = 0.0, 0.0
    for _ in range(instances):
        d = random_cof(rng, int(rng.integers(1, 7)), int(rng.integers(1, 3)))
        P, Q = _points(rng, pairs), _points(rng, pairs)
        cof = max(cof, max(cof_identity_residual(d, Quaternion(*p), Quaternion(*q)) for p, q in zip(P, Q)))
    d = random_cof(rng, 4, 2, 1)
    spec = KernelSpec.schur(cof_function(d), d.J, d.J)
    g = GramSpec(tuple(Quaternion(*p) for p in _points(rng, 40)), tuple(QMatrix.random(rng, 2, 1) for _ in range(40)))
    eigs = gram_eigenvalues(gram_matrix(spec, g))
    psd = max(0.0, -float(eigs.min()))
    out.add("cof-kernel-identity", cof, 1e-11)
    out.add("cof-gram-psd", psd, 1e-8)
    out.plots.setdefault("kappa_spectra", {})["cof"] = eigs.tolist()

    ex = example_gp_star_inverse(Quaternion(0, 1, 0, 0))
    gp_gap = 0.0
    for p in _points(rng, 10 * pairs):
        p = Quaternion(*p)
        target = (p * p + 1.0).inverse() * (p - Quaternion(0, 1, 0, 0))
        gp_gap = max(gp_gap, abs(gp_backward_shift_eval(ex, p).item() - target))
    out.add("gp-example-values", gp_gap, 1e-12)
    out.add("gp-example-real-condition", gp_real_part(ex).max_abs(), 0.0, exact=True)

    inv_gap, kphi = 0.0, 0.0
    for _ in range(instances):
        m = random_pair_model(rng, int(rng.integers(1, 6)), int(rng.integers(1, 3)))
        for x in (0.3, 1.0, 2.5):
            prod = pair_phi_eval(m, x) @ pair_phi_inverse_eval(m, x)
            inv_gap = max(inv_gap, qdiff(prod, QMatrix.eye(prod.rows)))
    spec = KernelSpec.gp(pair_function(m))
    g = GramSpec(tuple(Quaternion(*p) for p in _points(rng, 20)), tuple(QMatrix.random(rng, m.J.rows, 1) for _ in range(20)))
    kphi = max(0.0, -float(gram_eigenvalues(gram_matrix(spec, g)).min()))
    out.add("pair-model-star-inverse", inv_gap, 1e-10)
    out.add("kphi-gram-psd", kphi, 1e-8)
    r1r1 = max(r1r1_residual(random_unitary(rng, int(rng.integers(1, 6))), float(rng.uniform(0.3, 3.0))) for _ in range(10))
    out.add("r1r1-identity", r1r1, 1e-12)
    return out


def pg_suite(rng, instances: int = 20) -> SuiteResult:
    out = SuiteResult()
    perl, inv = 0.0, 0.0
    for _ in range(instances):
        r1 = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        r = random_schur_realization(rng, int(rng.integers(1, 4)), r1 + m)
        xs = rng.uniform(0.3, 3.0, 4)
        for x in xs:
            Sx = schur_real_axis(r, x)
            inv = max(inv, qdiff(pg_transform(pg_transform(Sx, (r1, r1)), (r1, r1)), Sx))
            for y in xs:
                perl = max(perl, perlette_residual(Sx, schur_real_axis(r, y), x, y, (r1, r1)))
    out.add("pg-kernel-factorization", perl, 1e-10)
    out.add("pg-involution", inv, 1e-11)
    return out


def _inverse_blaschke_spec() -> KernelSpec:
    f = SliceFunction.real_axis(lambda p: QMatrix.scalar((p.w + 1.0) / (p.w - 1.0)), "b1^-*")
    return KernelSpec.schur(f)


def kappa_suite(rng, seed: int, trials: int = 20, points: int = 40) -> SuiteResult:
    out = SuiteResult()
    d = random_cof(rng, 3, 2, 1)
    cases = [
        ("cof", KernelSpec.schur(cof_function(d), d.J, d.J), points, 0),
        ("hardy", KernelSpec.hardy(), points, 0),
        ("minus-hardy", KernelSpec.negative_hardy(), 1, 1),
        ("inverse-blaschke", _inverse_blaschke_spec(), points, 1),
    ]
    spectra = {}
    for name, spec, npts, expect in cases:
        est = estimate_negative_squares(spec, trials, npts, seed)
        out.add(f"kappa-{name}", abs(est.kappa_hat - expect), 0, exact=True)
        out.values[f"kappa_hat_{name}"] = est.kappa_hat
        spectra[name] = est.spectra[0].tolist()
    out.plots["kappa_spectra"] = spectra
    mism = 0
    xs = tuple(Quaternion(x) for x in np.linspace(0.4, 2.8, 8))
    for t in range(10):
        while True:
            alpha = PowerSeries.scalar([Quaternion(*c) for c in rng.normal(size=(3, 4))])
            if all(abs(alpha(x).item()) > 1e-3 for x in xs):
                break
        spec = KernelSpec.hardy() if t % 2 == 0 else _inverse_blaschke_spec()
        res = congruence_kappa_check(spec, alpha, GramSpec(xs))
        mism += int(res.kappa_before != res.kappa_after)
    out.add("kappa-congruence-mismatches", mism, 0, exact=True)
    return out


def hardy_suite(rng, q: hd.QuadratureSpec = hd.DEFAULT_QUADRATURE, parts=("reproducing", "onb", "isometry", "norms")) -> SuiteResult:
    out = SuiteResult()
    if "norms" in parts:
        nrm = hd.slice_norm(hd.star_inverse_linear(1.0), q=q) ** 2
        out.add("hardy-norm-pi", abs(nrm - math.pi) / math.pi, 1e-3)
        worst = 0.0
        f = hd.star_inverse_linear(Quaternion(1.0, 0.7, -0.2, 0.4)) + hd.onb_function(2).right_mul(Quaternion(0, 0, 1, 1))
        ratios = []
        for _ in range(20):
            ratio = hd.norm_equivalence_check(f, random_unit_imaginary(rng), random_unit_imaginary(rng), q)
            ratios.append(ratio)
            worst = max(worst, 0.5 - ratio, ratio - 2.0)
        out.add("hardy-norm-equivalence", max(worst, 0.0), 1e-4)
        out.add("hardy-conjugate-norm", hd.conjugate_norm_check(hd.star_inverse_linear(Quaternion(1.0, 1.0, 0.0, 0.0)), q), 1e-4)
        out.values["norm_ratios"] = ratios
    if "reproducing" in parts:
        worst = 0.0
        fs = [hd.star_inverse_linear(1.0), hd.star_inverse_linear(Quaternion(0.8, 0.3, 0.5, 0.0)), hd.onb_function(3)]
        for p in [Quaternion(1.0)] + [Quaternion(*p) for p in _points(rng, 3)]:
            for f in fs:
                worst = max(worst, hd.reproducing_residual(f, p, q))
        out.add("hardy-reproducing", worst, 1e-4)
    if "onb" in parts:
        G = hd.onb_gram(7)
        dev = G.copy()
        for n in range(G.shape[0]):
            dev[n, n, 0] -= 1.0
        out.add("hardy-onb-gram", float(np.abs(dev).max()), 1e-6)
        out.plots["onb_gram"] = np.linalg.norm(G, axis=-1).tolist()
    if "isometry" in parts:
        pairs = [
            (Quaternion(1.0, 1.0, 0.0, 0.0), hd.star_inverse_linear(2.0)),
            (Quaternion(0.5, 0.0, 0.3, 0.0), hd.star_inverse_linear(1.0)),
            (Quaternion(2.0, 0.0, 0.0, -1.0), hd.onb_function(1)),
            (Quaternion(0.8, 0.2, 0.2, 0.2), hd.star_inverse_linear(Quaternion(1.0, 0.0, 1.0, 0.0))),
            (Quaternion(1.5, -0.5, 0.0, 0.5), hd.onb_function(0).right_mul(Quaternion(0, 1, 1, 0))),
        ]
        worst = max(hd.blaschke_isometry_check(a, f, q, seed=int(rng.integers(2**31))) for a, f in pairs)
        out.add("hardy-blaschke-isometry", worst, 1e-4)
    return out


SUITES: dict[str, Callable] = {
    "linalg": linalg_suite,
    "kernel": kernel_suite,
    "star": star_suite,
    "cauchy": cauchy_suite,
    "blaschke": blaschke_suite,
    "realize": realization_suite,
    "pg": pg_suite,
}
