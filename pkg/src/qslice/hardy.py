"""Quadrature for the Hardy space of the right half-space.

Inner products are slice integrals ``<f, g> = int conj(g(I y)) f(I y) dy`` over
the boundary line of one slice.  Functions are evaluated in bulk on arrays of
quaternions of shape ``(N, 4)``; the truncated tails beyond the cutoff are
estimated from the asserted boundary decay ``|f(I y)| ~ |y|^{-s}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, EvaluationError
from .kernels import k_eval_many
from .quat import (
    CANONICAL_UNIT,
    Quaternion,
    UnitImaginary,
    qconj,
    qinv,
    qmul,
    qnorm2,
    qreal,
    qslice_parts,
    random_unit_imaginary,
    slice_decompose,
)

SCHEMES = ("composite-simpson", "gauss-legendre-panels")
GL_ORDER = 16


@dataclass(frozen=True)
class QuadratureSpec:
    cutoff: float = 1e4
    nodes: int = 200_000
    scheme: str = "composite-simpson"

    def __post_init__(self):
        if not self.cutoff > 0:
            raise DomainError("cutoff must be positive")
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown quadrature scheme {self.scheme!r}")
        if self.scheme == "composite-simpson" and (self.nodes < 2 or self.nodes % 2):
            raise DomainError("composite Simpson needs an even, positive node count")
        if self.nodes < 1:
            raise DomainError("nodes must be positive")

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        """Abscissae and weights: ``[-R, R]`` for Simpson, the whole line for the panels."""
        R = self.cutoff
        if self.scheme == "composite-simpson":
            y = np.linspace(-R, R, self.nodes + 1)
            h = 2.0 * R / self.nodes
            w = np.full(y.size, 2.0)
            w[1::2] = 4.0
            w[0] = w[-1] = 1.0
            return y, w * (h / 3.0)
        # Gauss-Legendre panels in theta over the whole line, y = tan(theta);
        # no truncation, so the cutoff is unused here
        panels = max(1, self.nodes // GL_ORDER)
        t, wt = np.polynomial.legendre.leggauss(GL_ORDER)
        edges = np.linspace(-0.5 * math.pi, 0.5 * math.pi, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        theta = (mid[:, None] + half[:, None] * t[None, :]).ravel()
        wth = (half[:, None] * wt[None, :]).ravel()
        return np.tan(theta), wth / np.cos(theta) ** 2


DEFAULT_QUADRATURE = QuadratureSpec()
# Simpson at the default step leaves ~3e-6 on the high-index basis entries;
# the tangent-mapped panels integrate the basis products to rounding level
ONB_QUADRATURE = QuadratureSpec(nodes=3200, scheme="gauss-legendre-panels")


@dataclass(frozen=True)
class HardyFunction:
    """Scalar slice-regular function on the right half-space, evaluated in bulk.

    ``many`` maps an ``(N, 4)`` array of points to an ``(N, 4)`` array of
    values; ``decay`` is the asserted exponent ``s >= 1`` in ``|f(I y)| ~ |y|^-s``.
    """

    many: Callable
    decay: float = 1.0
    name: str = ""

    def __post_init__(self):
        if self.decay < 1.0:
            raise DomainError("decay_hint must be at least 1")

    def __call__(self, p) -> Quaternion:
        return Quaternion(*(float(v) for v in self.many(np.asarray(Quaternion.of(p), float)[None, :])[0]))

    @classmethod
    def from_scalar(cls, fn: Callable, decay: float = 1.0, name: str = "") -> "HardyFunction":
        def many(P):
            return np.array([tuple(Quaternion.of(fn(Quaternion(*row)))) for row in P], dtype=float)

        return cls(many, decay, name)

    def right_mul(self, c) -> "HardyFunction":
        c = np.asarray(Quaternion.of(c), float)
        return HardyFunction(lambda P: qmul(self.many(P), c), self.decay, f"{self.name}*c")

    def __add__(self, other: "HardyFunction") -> "HardyFunction":
        return HardyFunction(lambda P: self.many(P) + other.many(P), min(self.decay, other.decay), "sum")


# ---------------------------------------------------------------------------
# Standard test functions
# ---------------------------------------------------------------------------

def _intrinsic(P: np.ndarray, fz: Callable) -> np.ndarray:
    """Apply a complex function with real-symmetric coefficients slice by slice."""
    x, y, unit = qslice_parts(P)
    w = fz(x + 1j * y)
    out = unit * w.imag[..., None]
    out[..., 0] = w.real
    return out


def star_inverse_linear(c) -> HardyFunction:
    """``(p + c)^{-*} = (p^2 + 2 Re(c) p + |c|^2)^{-1} (p + conj c)`` for ``Re c > 0``."""
    c = Quaternion.of(c)
    if not c.w > 0:
        raise DomainError("(p + c)^{-*} is in the Hardy space only for Re(c) > 0")
    cb = np.asarray(c.conj(), float)

    def many(P):
        den = _intrinsic(P, lambda z: z * z + 2.0 * c.w * z + c.norm2())
        return qmul(qinv(den), P + cb)

    return HardyFunction(many, 1.0, f"(p+{tuple(c)})^-*")


def onb_many(n: int, P: np.ndarray) -> np.ndarray:
    if n < 0:
        raise DomainError("basis index must be nonnegative")
    return _intrinsic(P, lambda z: (z - 1.0) ** n / (z + 1.0) ** (n + 1) / math.sqrt(math.pi))


def onb_eval(n: int, p) -> Quaternion:
    """``Phi_n(p) = pi^{-1/2} (p - 1)^n (p + 1)^{-(n+1)}``."""
    return Quaternion(*onb_many(n, np.asarray(Quaternion.of(p), float)[None, :])[0])


def onb_function(n: int) -> HardyFunction:
    return HardyFunction(lambda P: onb_many(n, P), 1.0, f"Phi_{n}")


def kernel_column(q0) -> HardyFunction:
    """``p -> k(p, q0)``."""
    q = np.asarray(Quaternion.of(q0), float)
    return HardyFunction(lambda P: k_eval_many(P, q), 1.0, "k(., q0)")


def blaschke_star(a, f: HardyFunction) -> HardyFunction:
    """``b_a * f`` through ``(b_a * f)(p) = b_a(p) f(b_a(p)^{-1} p b_a(p))``."""
    a = Quaternion.of(a)
    if not a.w > 0:
        raise DomainError("Blaschke factor needs Re(a) > 0")
    a2 = np.asarray(a * a, float)

    def many(P):
        den = _intrinsic(P, lambda z: z * z + 2.0 * a.w * z + a.norm2())
        num = qmul(P, P) - a2
        v = qmul(qinv(den), num)
        small = qnorm2(v) < 1e-26
        v_safe = np.where(small[:, None], qreal(np.ones(len(P))), v)
        twisted = qmul(qmul(qinv(v_safe), P), v_safe)
        out = qmul(v, f.many(twisted))
        out[small] = 0.0
        return out

    return HardyFunction(many, f.decay, f"b_a*{f.name}")


def star_conjugate(f: HardyFunction) -> HardyFunction:
    """``f^c``: on each slice ``f(z) = F(z) + G(z) J`` gives ``f^c(z) = conj F(conj z) - G(z) J``."""

    def many(P):
        P = np.asarray(P, float)
        x, y, unit = qslice_parts(P)
        J, K = _orthonormal_frame(unit)
        val = f.many(P)
        mirror = P.copy()
        mirror[..., 1:] *= -1.0
        val_bar = f.many(mirror)
        # F(conj z) part of the mirrored value, conjugated inside C_I
        a = val_bar[..., 0]
        b = np.sum(val_bar[..., 1:] * unit[..., 1:], axis=-1)
        c = np.sum(val[..., 1:] * J[..., 1:], axis=-1)
        d = np.sum(val[..., 1:] * K[..., 1:], axis=-1)
        # G(z) J = c J + d K
        out = unit * (-b)[..., None] - J * c[..., None] - K * d[..., None]
        out[..., 0] = a
        return out

    return HardyFunction(many, f.decay, f"{f.name}^c")


def _orthonormal_frame(unit: np.ndarray):
    """Units ``J`` orthogonal to ``I`` and ``K = I J``, row by row."""
    v = unit[..., 1:]
    helper = np.zeros_like(v)
    use_j = np.abs(v[..., 0]) > 0.9
    helper[..., 0] = np.where(use_j, 0.0, 1.0)
    helper[..., 1] = np.where(use_j, 1.0, 0.0)
    jv = helper - v * np.sum(helper * v, axis=-1, keepdims=True)
    jv /= np.linalg.norm(jv, axis=-1, keepdims=True)
    J = np.zeros_like(unit)
    J[..., 1:] = jv
    return J, qmul(unit, J)


# ---------------------------------------------------------------------------
# Inner products and checks
# ---------------------------------------------------------------------------

class InnerProduct(NamedTuple):
    value: Quaternion
    tail: float


def _line(I, y: np.ndarray, x: float = 0.0) -> np.ndarray:
    unit = np.asarray(UnitImaginary(*Quaternion.of(I)), float)
    P = np.outer(y, unit)
    P[:, 0] = x
    return P


def _integrate(values: np.ndarray, y: np.ndarray, w: np.ndarray, exponent: float, spec: QuadratureSpec):
    if not np.all(np.isfinite(values)):
        raise EvaluationError("non-finite value in the quadrature integrand")
    total = np.sum(values * w[:, None], axis=0)
    tail = np.zeros(4)
    if spec.scheme == "composite-simpson" and exponent > 1.0:
        # int_R^inf c y^-e dy = R h(R)/(e - 1)
        tail = spec.cutoff * (values[0] + values[-1]) / (exponent - 1.0)
    return total + tail, float(np.sqrt(np.sum(tail ** 2)))


def hardy_inner_report(
    f: HardyFunction, g: HardyFunction, I=CANONICAL_UNIT, q: QuadratureSpec = DEFAULT_QUADRATURE, x: float = 0.0
) -> InnerProduct:
    y, w = q.rule()
    P = _line(I, y, x)
    vals = qmul(qconj(g.many(P)), f.many(P))
    total, tail = _integrate(vals, y, w, f.decay + g.decay, q)
    return InnerProduct(Quaternion(*(float(t) for t in total)), tail)


def hardy_inner(f: HardyFunction, g: HardyFunction, I=CANONICAL_UNIT, q: QuadratureSpec = DEFAULT_QUADRATURE) -> Quaternion:
    """``<f, g> = int conj(g(I y)) f(I y) dy``."""
    return hardy_inner_report(f, g, I, q).value


def slice_norm(f: HardyFunction, I=CANONICAL_UNIT, q: QuadratureSpec = DEFAULT_QUADRATURE, x: float = 0.0) -> float:
    """``(int |f(x + I y)|^2 dy)^{1/2}``; ``x = 0`` is the boundary norm."""
    return math.sqrt(max(hardy_inner_report(f, f, I, q, x).value.w, 0.0))


def reproducing_residual(
    f: HardyFunction, p, q: QuadratureSpec = DEFAULT_QUADRATURE, I=None
) -> float:
    """``|f(p) - (1/2pi) int k(p, I y) f(I y) dy|``, integrating over the slice of ``p`` by default."""
    p = Quaternion.of(p)
    if not p.w > 0:
        raise DomainError("p must lie in the right half-space")
    unit = slice_decompose(p).I if I is None else I
    y, w = q.rule()
    P = _line(unit, y)
    vals = qmul(k_eval_many(np.asarray(p, float)[None, :], P), f.many(P))
    total, _ = _integrate(vals, y, w, 1.0 + f.decay, q)
    approx = Quaternion(*(float(t) for t in total / (2.0 * math.pi)))
    return abs(f(p) - approx)


def onb_gram(n_max: int, q: QuadratureSpec = ONB_QUADRATURE, I=CANONICAL_UNIT) -> np.ndarray:
    """Gram matrix ``<Phi_m, Phi_n>`` for ``m, n <= n_max`` as an array of shape (N, N, 4)."""
    y, w = q.rule()
    P = _line(I, y)
    vals = [onb_many(n, P) for n in range(n_max + 1)]
    N = n_max + 1
    out = np.zeros((N, N, 4))
    for m in range(N):
        for n in range(m, N):
            total, _ = _integrate(qmul(qconj(vals[n]), vals[m]), y, w, 2.0, q)
            out[m, n] = total
            out[n, m] = qconj(total)
    return out


def onb_kernel_partial(N: int, p, q0) -> Quaternion:
    """``sum_{n < N} Phi_n(p) conj(Phi_n(q0))``, which tends to ``k(p, q0)/(2 pi)``."""
    acc = Quaternion()
    for n in range(N):
        acc = acc + onb_eval(n, p) * onb_eval(n, q0).conj()
    return acc


def norm_equivalence_check(f: HardyFunction, I, J, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Ratio ``||f||_J / ||f||_I`` of two slice norms."""
    nI = slice_norm(f, I, q)
    if nI == 0.0:
        raise DomainError("f vanishes on the reference slice")
    return slice_norm(f, J, q) / nI


def conjugate_norm_check(f: HardyFunction, q: QuadratureSpec = DEFAULT_QUADRATURE, I=CANONICAL_UNIT) -> float:
    """``| ||f||_I - ||f^c||_I |``."""
    return abs(slice_norm(f, I, q) - slice_norm(star_conjugate(f), I, q))


def blaschke_isometry_check(
    a, f: HardyFunction, q: QuadratureSpec = DEFAULT_QUADRATURE, slices: Sequence | None = None, seed: int = 0
) -> float:
    """``max_I | ||b_a * f||_I - ||f||_I |`` over the given (or sampled) slices."""
    if slices is None:
        rng = np.random.default_rng(seed)
        slices = [CANONICAL_UNIT, Quaternion(0, 0, 1, 0), random_unit_imaginary(rng)]
    bf = blaschke_star(a, f)
    return max(abs(slice_norm(bf, I, q) - slice_norm(f, I, q)) for I in slices)
