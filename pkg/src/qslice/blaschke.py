"""Blaschke factors at points and spheres of the right half-space, and their star products."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import ConstructionFailure, DomainError, SingularPoint
from .quat import Quaternion, quat_inverse, random_unit_imaginary, slice_decompose
from .slicefn import star_fold

SPHERE_TOL = 1e-10
VANISH_TOL = 1e-9


def _pole_check(a: Quaternion, p: Quaternion) -> None:
    if math.hypot(p.w + a.w, p.imag_norm() - a.imag_norm()) <= SPHERE_TOL:
        raise SingularPoint("evaluation point lies on the pole sphere [-a]")


def _den(a: Quaternion, p: Quaternion) -> Quaternion:
    # p^2 + 2 Re(a) p + |a|^2, a polynomial in p with real coefficients
    return p * p + p * (2.0 * a.w) + a.norm2()


@dataclass(frozen=True)
class BlaschkeFactor:
    a: Quaternion

    def __post_init__(self):
        a = Quaternion.of(self.a)
        if not a.w > 0:
            raise DomainError("Blaschke factor needs Re(a) > 0")
        object.__setattr__(self, "a", a)

    def __call__(self, p) -> Quaternion:
        return blaschke_eval(self, p)

    def to_json(self) -> dict:
        return {"kind": "point", "a": self.a.to_json()}


@dataclass(frozen=True)
class SphereFactor:
    a: Quaternion

    def __post_init__(self):
        a = Quaternion.of(self.a)
        if not a.w > 0:
            raise DomainError("sphere factor needs Re(a) > 0")
        object.__setattr__(self, "a", a)

    def __call__(self, p) -> Quaternion:
        return sphere_factor_eval(self, p)

    def to_json(self) -> dict:
        return {"kind": "sphere", "a": self.a.to_json()}


Factor = Union[BlaschkeFactor, SphereFactor]


def blaschke_eval(f: BlaschkeFactor, p) -> Quaternion:
    """``(p^2 + 2 Re(a) p + |a|^2)^{-1} (p^2 - a^2)``."""
    p = Quaternion.of(p)
    a = f.a
    _pole_check(a, p)
    return quat_inverse(_den(a, p)) * (p * p - a * a)


def sphere_factor_eval(f: SphereFactor, p) -> Quaternion:
    """``(p^2 + 2 Re(a) p + |a|^2)^{-1} (p^2 - 2 Re(a) p + |a|^2)``."""
    p = Quaternion.of(p)
    a = f.a
    _pole_check(a, p)
    return quat_inverse(_den(a, p)) * (p * p - p * (2.0 * a.w) + a.norm2())


def product_eval(factors: Sequence[Factor], p) -> Quaternion:
    """Left-to-right star product of the factors, evaluated at ``p``."""
    return star_fold(list(factors), p).value


# ---------------------------------------------------------------------------
# Prescribed zeros
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroSet:
    points: tuple = ()
    spheres: tuple = ()

    def __post_init__(self):
        pts = tuple((Quaternion.of(a), int(mu)) for a, mu in self.points)
        sph = tuple((Quaternion.of(c), int(nu)) for c, nu in self.spheres)
        for q, m in pts + sph:
            if q.w <= 0:
                raise DomainError("zeros must lie in the right half-space")
            if m < 1:
                raise DomainError("multiplicities must be positive")
        for group in (pts, sph):
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    if _same_sphere(group[i][0], group[j][0]):
                        raise DomainError("zeros of one kind must lie on distinct spheres")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "spheres", sph)

    @classmethod
    def from_json(cls, obj) -> "ZeroSet":
        try:
            points = [(p["a"], p.get("mu", 1)) for p in obj.get("points", [])]
            spheres = [(s["c"], s.get("nu", 1)) for s in obj.get("spheres", [])]
        except (AttributeError, KeyError, TypeError) as exc:
            raise DomainError(f"malformed zero set: {exc}") from exc
        return cls(tuple(points), tuple(spheres))


def _same_sphere(p: Quaternion, q: Quaternion, tol: float = 1e-12) -> bool:
    return abs(p.w - q.w) <= tol and abs(p.imag_norm() - q.imag_norm()) <= tol


def slice_taylor_coefficient(factors: Sequence[Factor], a, order: int, nodes: int = 64) -> Quaternion:
    """Coefficient of ``(p - a)^order`` of the product, expanded inside the slice of ``a``.

    On ``C_I`` the product is ``F(z) + G(z) J`` with ``F, G`` holomorphic, so
    the coefficient is a Cauchy integral over a small circle about ``a``.
    """
    a = Quaternion.of(a)
    unit = slice_decompose(a).I
    r = 0.25 * a.w
    acc = Quaternion()
    for k in range(nodes):
        t = 2.0 * math.pi * k / nodes
        step = Quaternion(r * math.cos(t)) + unit * (r * math.sin(t))
        acc = acc + quat_inverse(_power(step, order)) * product_eval(factors, a + step)
    return acc * (1.0 / nodes)


def _power(q: Quaternion, n: int) -> Quaternion:
    out = Quaternion(1.0)
    for _ in range(n):
        out = out * q
    return out


def prescribe_zeros(zeros: ZeroSet) -> list:
    """Factor list whose star product vanishes on the zero set with the given multiplicities.

    Sphere factors come first.  For a point zero ``a`` the k-th factor sits at
    ``D^{-1} a D``, where ``D`` is the leading nonzero slice Taylor coefficient
    at ``a`` of the product built so far; for ``k = 1`` this is the value
    ``B_prev(a)``, which makes the product vanish at ``a``, and for ``k >= 2``
    it raises the order of vanishing along the slice of ``a`` by one.
    """
    factors: list = []
    for c, nu in zeros.spheres:
        factors.extend([SphereFactor(c)] * nu)
    for a, mu in zeros.points:
        for k in range(mu):
            try:
                if not factors:
                    lead = Quaternion(1.0)
                elif k == 0:
                    lead = product_eval(factors, a)
                else:
                    lead = slice_taylor_coefficient(factors, a, k)
            except SingularPoint as exc:
                raise ConstructionFailure("alignment evaluation hit a pole") from exc
            if abs(lead) <= VANISH_TOL:
                raise ConstructionFailure("previous factors already vanish to this order at a point zero")
            factors.append(BlaschkeFactor(quat_inverse(lead) * a * lead))
        if abs(product_eval(factors, a)) > VANISH_TOL:
            raise ConstructionFailure("constructed product does not vanish at a prescribed zero")
    return factors


def vanishing_derivative(factors: Sequence[Factor], a, h: float = 1e-3) -> float:
    """Central difference of the product along the real direction through ``a``."""
    a = Quaternion.of(a)
    up = product_eval(factors, a + h)
    down = product_eval(factors, a - h)
    return abs(up - down) / (2.0 * h)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

class ConvergenceDiagnostic(NamedTuple):
    sum_re: float
    verdict: bool


PROBES = (Quaternion(1.0), Quaternion(2.0, 0.5, 0.0, 0.0), Quaternion(0.5, 0.0, 1.0, 1.0))


def partial_product_gap(as_: Sequence, probes=PROBES) -> float:
    """Largest gap between the full and the half-length partial products at the probes."""
    factors = [BlaschkeFactor(a) for a in as_]
    half = len(factors) // 2
    gaps = [abs(product_eval(factors, p) - product_eval(factors[:half], p)) for p in probes]
    return max(gaps) if gaps else 0.0


def convergence_diagnostic(as_: Sequence, tol: float = 0.05) -> ConvergenceDiagnostic:
    """``sum Re(a_j)`` and a finite-sample verdict on convergence of the infinite product.

    The verdict requires both the tail sum over the second half of the list
    and the partial-product gap at the probe points to stay below ``tol``.
    """
    qs = [Quaternion.of(a) for a in as_]
    if any(q.w <= 0 for q in qs):
        raise DomainError("all points must have positive real part")
    re = np.array([q.w for q in qs])
    total = float(re.sum())
    tail = float(re[len(re) // 2:].sum())
    verdict = tail <= tol and partial_product_gap(qs) <= tol
    return ConvergenceDiagnostic(total, bool(verdict))


def boundary_modulus_check(f: BlaschkeFactor, samples: int, seed: int, y_max: float = 10.0) -> float:
    """Max over random ``(I, y)`` of ``| |(I y + conj a)^{-1}(I y - a)| - 1 |``."""
    if samples < 1:
        raise DomainError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    a = f.a
    worst = 0.0
    for _ in range(samples):
        unit = random_unit_imaginary(rng)
        y = float(rng.uniform(-y_max, y_max))
        iy = unit * y
        val = quat_inverse(iy + a.conj()) * (iy - a)
        worst = max(worst, abs(abs(val) - 1.0))
    return worst
