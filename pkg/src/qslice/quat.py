"""Quaternion scalars, slice coordinates, and vectorised quaternion arrays.

Scalars are :class:`Quaternion` named tuples ``(w, x, y, z)`` standing for
``w + x i + y j + z k``.  Hot loops (kernel sweeps, quadrature) work on plain
``numpy`` arrays of shape ``(..., 4)`` with the same component order, through
the ``q*`` array functions at the bottom of this module.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError

ZERO_TOL = 1e-12
UNDERFLOW = 1e-150


class Quaternion(NamedTuple):
    """Quaternion ``w + x i + y j + z k`` with double components.

    >>> i, j = Quaternion(0, 1), Quaternion(0, 0, 1)
    >>> i * j
    Quaternion(w=0.0, x=0.0, y=0.0, z=1.0)
    >>> j * i
    Quaternion(w=0.0, x=0.0, y=0.0, z=-1.0)
    """

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def of(cls, value) -> "Quaternion":
        """Coerce a real number, a quaternion, or a 4-sequence."""
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, (int, float, np.floating, np.integer)):
            return cls(float(value), 0.0, 0.0, 0.0)
        if isinstance(value, complex):
            return cls(value.real, value.imag, 0.0, 0.0)
        w, x, y, z = (float(v) for v in value)
        return cls(w, x, y, z)

    # -- basic accessors ---------------------------------------------------
    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> "Quaternion":
        return Quaternion(0.0, self.x, self.y, self.z)

    def imag_norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inverse(self) -> "Quaternion":
        return quat_inverse(self)

    def is_real(self, tol: float = ZERO_TOL) -> bool:
        return self.imag_norm() <= tol

    def to_json(self) -> list:
        return [self.w, self.x, self.y, self.z]

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a1, b1, c1, d1 = self
        a2, b2, c2, d2 = o
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self

    def __truediv__(self, other):
        # right division: self * other^{-1}
        if isinstance(other, (int, float)):
            return Quaternion(self.w / other, self.x / other, self.y / other, self.z / other)
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * quat_inverse(o)

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * quat_inverse(self)

    def __repr__(self) -> str:
        return f"Quaternion(w={self.w!r}, x={self.x!r}, y={self.y!r}, z={self.z!r})"


def _coerce(value):
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Quaternion(float(value))
    return None


ONE = Quaternion(1.0)
I_UNIT = Quaternion(0.0, 1.0, 0.0, 0.0)
J_UNIT = Quaternion(0.0, 0.0, 1.0, 0.0)
K_UNIT = Quaternion(0.0, 0.0, 0.0, 1.0)


class UnitImaginary(Quaternion):
    """A quaternion of zero real part and unit modulus; squares to -1."""

    def __new__(cls, w=0.0, x=0.0, y=0.0, z=0.0, tol: float = 1e-10):
        q = Quaternion.of((w, x, y, z))
        if abs(q.w) > tol or abs(abs(q) - 1.0) > tol:
            raise DomainError(f"not a unit imaginary quaternion: {tuple(q)}")
        return super().__new__(cls, *q)

    @classmethod
    def normalize(cls, q) -> "UnitImaginary":
        """Project the imaginary part of ``q`` onto the unit sphere."""
        q = Quaternion.of(q)
        n = q.imag_norm()
        if n <= UNDERFLOW:
            raise DomainError("zero imaginary part has no direction")
        return cls(0.0, q.x / n, q.y / n, q.z / n)


class SliceCoordinates(NamedTuple):
    x: float
    y: float
    I: UnitImaginary

    def reconstruct(self) -> Quaternion:
        return Quaternion(self.x) + self.I * self.y


CANONICAL_UNIT = UnitImaginary(0.0, 1.0, 0.0, 0.0)


def slice_decompose(p) -> SliceCoordinates:
    """Write ``p = x + I y`` with ``y >= 0``; real ``p`` gets ``I = i``."""
    p = Quaternion.of(p)
    y = p.imag_norm()
    if y == 0.0:
        return SliceCoordinates(float(p.w), 0.0, CANONICAL_UNIT)
    unit = UnitImaginary.__new__(UnitImaginary, 0.0, p.x / y, p.y / y, p.z / y, tol=1e-8)
    return SliceCoordinates(float(p.w), y, unit)


def same_sphere(p, q, tol: float = ZERO_TOL) -> bool:
    if tol < 0:
        raise DomainError("tol must be nonnegative")
    p, q = Quaternion.of(p), Quaternion.of(q)
    return abs(p.w - q.w) <= tol and abs(p.imag_norm() - q.imag_norm()) <= tol


def quat_inverse(p) -> Quaternion:
    p = Quaternion.of(p)
    n2 = p.norm2()
    if n2 <= UNDERFLOW:
        raise DomainError("cannot invert a zero quaternion")
    return Quaternion(p.w / n2, -p.x / n2, -p.y / n2, -p.z / n2)


def twist(p, q) -> Quaternion:
    """Return ``q^{-1} p q``, a point on the sphere ``[p]``."""
    q = Quaternion.of(q)
    if abs(q) <= UNDERFLOW:
        raise DomainError("twist by zero")
    return quat_inverse(q) * Quaternion.of(p) * q


def random_unit_imaginary(rng: np.random.Generator) -> UnitImaginary:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return UnitImaginary(0.0, *v)


# ---------------------------------------------------------------------------
# Vectorised quaternion arrays, shape (..., 4)
# ---------------------------------------------------------------------------

def qarray(values: Sequence) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape[-1] != 4:
        raise DomainError("quaternion arrays need a trailing axis of length 4")
    return arr


def qreal(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape + (4,))
    out[..., 0] = r
    return out


def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a1, b1, c1, d1 = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    a2, b2, c2, d2 = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def qconj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def qnorm2(a: np.ndarray) -> np.ndarray:
    return np.sum(np.asarray(a, dtype=float) ** 2, axis=-1)


def qabs(a: np.ndarray) -> np.ndarray:
    return np.sqrt(qnorm2(a))


def qinv(a: np.ndarray) -> np.ndarray:
    n2 = qnorm2(a)
    if np.any(n2 <= UNDERFLOW):
        raise DomainError("cannot invert a zero quaternion")
    return qconj(a) / n2[..., None]


def qtwist(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return qmul(qmul(qinv(q), p), q)


def qslice_parts(p: np.ndarray):
    """Vectorised slice decomposition: returns ``(x, y, unit)`` arrays."""
    p = np.asarray(p, dtype=float)
    y = np.sqrt(np.sum(p[..., 1:] ** 2, axis=-1))
    unit = np.zeros_like(p)
    nz = y > 0
    unit[..., 1:][nz] = p[..., 1:][nz] / y[nz][..., None]
    unit[..., 1][~nz] = 1.0
    return p[..., 0], y, unit


def random_halfspace_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """Points with Re uniform in [0.2, 3], imaginary direction uniform, |Im| in [0, 2]."""
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    out = np.empty((n, 4))
    out[:, 0] = rng.uniform(0.2, 3.0, size=n)
    out[:, 1:] = d * rng.uniform(0.0, 2.0, size=n)[:, None]
    return out


def random_quaternions(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return rng.normal(scale=scale, size=(n, 4))
