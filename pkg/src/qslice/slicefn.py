"""Slice-regular functions: power series, slice extension, star products, Cauchy formula.

Power series carry right coefficients about a real center,
``f(p) = sum (p - x0)^n a_n``, which is the convention under which the
Cauchy product of coefficient sequences is the star product.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, SingularLeadingCoefficient, SingularMatrix
from .qlinalg import QMatrix, qmat_inverse
from .quat import (
    Quaternion,
    UnitImaginary,
    quat_inverse,
    qinv,
    qmul,
    qnorm2,
    qreal,
    qtwist,
    slice_decompose,
)

DEFAULT_CAP = 64
ZERO_PREFIX = 1e-13
NEAR_ZERO_FLAG = 1e-8


def _as_qmatrix(v) -> QMatrix:
    return v if isinstance(v, QMatrix) else QMatrix.scalar(v)


@dataclass(frozen=True)
class PowerSeries:
    center: float
    coeffs: tuple
    nominal_radius: float = math.inf

    def __post_init__(self):
        coeffs = tuple(_as_qmatrix(c) for c in self.coeffs)
        if not coeffs:
            raise DomainError("a power series needs at least one coefficient")
        shape = coeffs[0].shape
        if any(c.shape != shape for c in coeffs):
            raise DomainError("all coefficients must share one shape")
        if not self.nominal_radius > 0:
            raise DomainError("nominal_radius must be positive")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "center", float(self.center))

    @classmethod
    def scalar(cls, coeffs: Sequence, center: float = 0.0, nominal_radius: float = math.inf):
        return cls(center, tuple(QMatrix.scalar(c) for c in coeffs), nominal_radius)

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs[0].shape

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_scalar(self) -> bool:
        return self.shape == (1, 1)

    def scalar_coeffs(self) -> np.ndarray:
        """Coefficients of a 1x1 series as an ``(N, 4)`` array."""
        if not self.is_scalar():
            raise DomainError("series is not scalar")
        return np.array([c.item() for c in self.coeffs], dtype=float)

    def __call__(self, p) -> QMatrix:
        return ps_eval(self, p)

    def to_json(self) -> dict:
        return {"center": self.center, "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "PowerSeries":
        try:
            center = float(obj.get("center", 0.0))
            raw = obj["coeffs"]
        except (AttributeError, KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed PowerSeries JSON: {exc}") from exc
        coeffs = []
        for c in raw:
            coeffs.append(QMatrix.from_json(c) if isinstance(c, dict) else QMatrix.scalar(c))
        return cls(center, tuple(coeffs))


def ps_eval(f: PowerSeries, p) -> QMatrix:
    p = Quaternion.of(p)
    d = p - f.center
    if abs(d) >= f.nominal_radius:
        warnings.warn("evaluation point outside the nominal radius", RuntimeWarning, stacklevel=2)
    acc = f.coeffs[-1]
    for a in reversed(f.coeffs[:-1]):
        acc = a + acc.lmul(d)
    return acc


def ps_eval_scalar_many(coeffs: np.ndarray, points: np.ndarray, center: float = 0.0) -> np.ndarray:
    """Vectorised evaluation of a scalar series at many points (arrays of shape (..., 4))."""
    coeffs = np.asarray(coeffs, dtype=float)
    d = np.array(points, dtype=float, copy=True)
    d[..., 0] -= center
    acc = np.broadcast_to(coeffs[-1], d.shape).copy()
    for a in coeffs[-2::-1]:
        acc = a + qmul(d, acc)
    return acc


def ps_star_mul(f: PowerSeries, g: PowerSeries, cap: int = DEFAULT_CAP) -> PowerSeries:
    if f.center != g.center:
        raise DomainError("star product needs a common center")
    if f.shape[1] != g.shape[0]:
        raise DomainError("coefficient shapes are not composable")
    n_out = min(f.degree + g.degree + 1, cap)
    out = []
    for n in range(n_out):
        acc = QMatrix.zeros(f.shape[0], g.shape[1])
        for r in range(max(0, n - g.degree), min(n, f.degree) + 1):
            acc = acc + f.coeffs[r] @ g.coeffs[n - r]
        out.append(acc)
    return PowerSeries(f.center, tuple(out), min(f.nominal_radius, g.nominal_radius))


def ps_conjugate(f: PowerSeries) -> PowerSeries:
    if not f.is_scalar():
        raise DomainError("the conjugate function is only provided for scalar series")
    return PowerSeries(f.center, tuple(c.conj_entries() for c in f.coeffs), f.nominal_radius)


def ps_star_inverse(f: PowerSeries, order: int) -> PowerSeries:
    if f.shape[0] != f.shape[1]:
        raise DomainError("star inverse needs square coefficients")
    try:
        inv0 = qmat_inverse(f.coeffs[0])
    except SingularMatrix as exc:
        raise SingularLeadingCoefficient("leading coefficient is not invertible") from exc
    out = [inv0]
    for n in range(1, order + 1):
        acc = QMatrix.zeros(*f.shape)
        for r in range(1, min(n, f.degree) + 1):
            acc = acc + f.coeffs[r] @ out[n - r]
        out.append(-(inv0 @ acc))
    return PowerSeries(f.center, tuple(out))


def rx0_apply(f: PowerSeries) -> PowerSeries:
    """Backward shift ``(p - x0)^{-1} (f(p) - f(x0))``."""
    if f.degree == 0:
        return PowerSeries(f.center, (QMatrix.zeros(*f.shape),), f.nominal_radius)
    return PowerSeries(f.center, f.coeffs[1:], f.nominal_radius)


# ---------------------------------------------------------------------------
# Slice restrictions and stem pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SliceRestriction:
    """Values of a function on the slice ``C_I``; ``eval`` receives quaternions ``x + I y``."""

    I: UnitImaginary
    eval: Callable

    def at(self, x: float, y: float) -> QMatrix:
        return _as_qmatrix(self.eval(Quaternion(x) + self.I * y))


@dataclass(frozen=True)
class StemPair:
    """``f(x + I y) = alpha(x, y) + I beta(x, y)`` for every unit ``I``."""

    alpha: Callable
    beta: Callable

    def __call__(self, p) -> QMatrix:
        x, y, unit = slice_decompose(p)
        return self.alpha(x, y) + self.beta(x, y).lmul(unit)


def stem_pair_from_restriction(f_I: SliceRestriction) -> StemPair:
    I = f_I.I

    def alpha(x, y):
        return (f_I.at(x, y) + f_I.at(x, -y)) * 0.5

    def beta(x, y):
        return (f_I.at(x, y) - f_I.at(x, -y)).lmul(-I) * 0.5

    return StemPair(alpha, beta)


def series_restriction(f: PowerSeries, I=None) -> SliceRestriction:
    unit = UnitImaginary(*(I if I is not None else (0.0, 1.0, 0.0, 0.0)))
    return SliceRestriction(unit, lambda z: ps_eval(f, z))


def extend_slice(f_I: SliceRestriction, p) -> QMatrix:
    """Left slice extension of a restriction to an arbitrary quaternion ``p``."""
    x, y, J = slice_decompose(p)
    plus, minus = f_I.at(x, y), f_I.at(x, -y)
    return (plus + minus) * 0.5 + (minus - plus).lmul(J * f_I.I) * 0.5


# ---------------------------------------------------------------------------
# Pointwise evaluation of star products of scalar functions
# ---------------------------------------------------------------------------

class StarFold(NamedTuple):
    value: Quaternion
    near_zero: bool


def star_fold(factors: Sequence[Callable], p) -> StarFold:
    """Evaluate ``f1 * f2 * ... * fn`` at ``p`` by the twisting rule.

    ``(f * g)(p) = f(p) g(f(p)^{-1} p f(p))`` applied left to right; a prefix
    that vanishes makes the whole product vanish.
    """
    p = Quaternion.of(p)
    if not factors:
        return StarFold(Quaternion(1.0), False)
    v = Quaternion.of(_scalar(factors[0](p)))
    flag = False
    for g in factors[1:]:
        mag = abs(v)
        if mag < ZERO_PREFIX:
            return StarFold(Quaternion(), True)
        flag = flag or mag < NEAR_ZERO_FLAG
        q = quat_inverse(v) * p * v
        v = v * Quaternion.of(_scalar(g(q)))
    return StarFold(v, flag or abs(v) < NEAR_ZERO_FLAG)


def star_fold_many(factors: Sequence[Callable], P: np.ndarray) -> np.ndarray:
    """Bulk version of :func:`star_fold`; each factor maps ``(N, 4)`` points to ``(N, 4)`` values."""
    P = np.asarray(P, dtype=float)
    if not factors:
        return qreal(np.ones(P.shape[:-1]))
    v = np.asarray(factors[0](P), dtype=float)
    for g in factors[1:]:
        dead = qnorm2(v) < ZERO_PREFIX**2
        safe = np.where(dead[..., None], qreal(np.ones(P.shape[:-1])), v)
        v = qmul(v, np.asarray(g(qtwist(P, safe)), dtype=float))
        v[dead] = 0.0
    return v


def pointwise_star_eval(factors: Sequence[Callable], p) -> Quaternion:
    return star_fold(factors, p).value


def _scalar(v):
    if isinstance(v, QMatrix):
        return v.item()
    return v


# ---------------------------------------------------------------------------
# Cauchy formula on a circle in a slice
# ---------------------------------------------------------------------------

def cauchy_eval(f_I: SliceRestriction, p, radius: float, nodes: int = 256, center: float = 0.0) -> QMatrix:
    """Reproduce ``f(p)`` from values on the circle ``|s - center| = radius`` of ``C_I``.

    Uses the left Cauchy kernel ``-(p^2 - 2 p Re s + |s|^2)^{-1} (p - conj s)``
    with ``ds_I = r e^{I t} dt`` and the trapezoid rule.
    """
    if radius <= 0 or nodes < 1:
        raise DomainError("radius and nodes must be positive")
    p = Quaternion.of(p)
    x, y, _ = slice_decompose(p)
    dist = abs(complex(x - center, y))
    if abs(dist - radius) <= 1e-12 * max(1.0, radius):
        raise DomainError("evaluation point lies on the integration sphere")
    I = f_I.I
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    pts = np.zeros((nodes, 4))
    pts[:, 0] = center + radius * np.cos(theta)
    pts[:, 1:] = np.outer(radius * np.sin(theta), np.asarray(I)[1:])
    ds = np.zeros((nodes, 4))
    ds[:, 0] = radius * np.cos(theta)
    ds[:, 1:] = np.outer(radius * np.sin(theta), np.asarray(I)[1:])
    pa = np.broadcast_to(np.asarray(p, dtype=float), (nodes, 4))
    p2 = qmul(pa, pa)
    re_s = pts[:, 0]
    abs_s2 = np.sum(pts ** 2, axis=1)
    den = p2 - 2.0 * pa * re_s[:, None] + qreal(abs_s2)
    num = pa.copy()
    num[:, 0] -= pts[:, 0]
    num[:, 1:] += pts[:, 1:]
    kern = -qmul(qinv(den), num)
    weights = qmul(kern, ds) * (1.0 / nodes)
    acc = None
    for k in range(nodes):
        term = f_I.at(pts[k, 0], float(np.dot(pts[k, 1:], np.asarray(I)[1:]))).lmul(Quaternion(*weights[k]))
        acc = term if acc is None else acc + term
    return acc


# ---------------------------------------------------------------------------
# Generic matrix-valued slice functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SliceFunction:
    """A matrix-valued function of one quaternion variable.

    ``quaternionic`` says whether off-axis evaluation is meaningful for the
    kernel machinery; ``kernel_factor`` (when known) returns ``G(p)`` with
    the associated kernel equal to ``G(p) G(q)^*``.
    """

    eval: Callable
    quaternionic: bool = True
    kernel_factor: Callable | None = None
    name: str = ""

    def __call__(self, p) -> QMatrix:
        return _as_qmatrix(self.eval(Quaternion.of(p)))

    @classmethod
    def constant(cls, value, name: str = "constant") -> "SliceFunction":
        value = _as_qmatrix(value)
        return cls(lambda p: value, True, None, name)

    @classmethod
    def from_series(cls, f: PowerSeries, name: str = "series") -> "SliceFunction":
        return cls(lambda p: ps_eval(f, p), False, None, name)

    @classmethod
    def real_axis(cls, fn: Callable, name: str = "real-axis") -> "SliceFunction":
        return cls(fn, False, None, name)
