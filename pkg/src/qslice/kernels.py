"""The half-space reproducing kernel, Schur and generalized-positive kernels, negative squares.

``k(p, q) = (conj p + conj q)(|p|^2 + 2 Re(p) conj q + conj q^2)^{-1}`` is the
slice extension of ``1/(z + conj w)``.  Every kernel ``K`` handled here
satisfies a Stein-type identity ``p K + K conj(q) = R(p, q)`` with a known
right-hand side, and is evaluated by solving that equation pointwise.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, SingularBlock, SingularKernelPoint, SingularMatrix, UnsupportedEvaluation
from .qlinalg import (
    QMatrix,
    chi_embed,
    hermitian_eigenvalues,
    qdiff,
    qmat_inverse,
    signature,
    signature_and_spectrum,
    signature_matrix,
)
from .quat import (
    Quaternion,
    qconj,
    qinv,
    qmul,
    qnorm2,
    qreal,
    random_halfspace_points,
)
from .slicefn import PowerSeries, SliceFunction, ps_eval

SPHERE_TOL = 1e-10
DEN_TOL = 1e-12


class KernelKind(str, Enum):
    HARDY_K = "HARDY_K"
    SCHUR_KS = "SCHUR_KS"
    GP_KPHI = "GP_KPHI"


# ---------------------------------------------------------------------------
# Scalar kernel
# ---------------------------------------------------------------------------

def _check_sphere(p: Quaternion, q: Quaternion) -> None:
    # singular set of the denominator: p on the sphere [-conj q]
    d = math.hypot(p.w + q.w, p.imag_norm() - q.imag_norm())
    if d <= SPHERE_TOL:
        raise SingularKernelPoint("p lies on the sphere [-conj(q)]")


def _stein_denominator(p: Quaternion, q: Quaternion) -> Quaternion:
    qb = q.conj()
    return Quaternion(p.norm2()) + qb * (2.0 * p.w) + qb * qb


def k_eval(p, q) -> Quaternion:
    p, q = Quaternion.of(p), Quaternion.of(q)
    _check_sphere(p, q)
    den = _stein_denominator(p, q)
    if abs(den) <= DEN_TOL:
        raise SingularKernelPoint("kernel denominator vanishes")
    return (p.conj() + q.conj()) * den.inverse()


def k_eval_alt(p, q) -> Quaternion:
    """The equivalent form ``(|q|^2 + 2 Re(q) p + p^2)^{-1} (p + q)``."""
    p, q = Quaternion.of(p), Quaternion.of(q)
    _check_sphere(p, q)
    den = Quaternion(q.norm2()) + p * (2.0 * q.w) + p * p
    if abs(den) <= DEN_TOL:
        raise SingularKernelPoint("kernel denominator vanishes")
    return den.inverse() * (p + q)


def k_identity_residual(p, q) -> float:
    p, q = Quaternion.of(p), Quaternion.of(q)
    k = k_eval(p, q)
    return abs(p * k + k * q.conj() - 1.0)


def k_eval_many(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Vectorised ``k`` over broadcastable arrays of quaternions."""
    P, Q = np.broadcast_arrays(np.asarray(P, float), np.asarray(Q, float))
    ip = np.linalg.norm(P[..., 1:], axis=-1)
    iq = np.linalg.norm(Q[..., 1:], axis=-1)
    if np.any(np.hypot(P[..., 0] + Q[..., 0], ip - iq) <= SPHERE_TOL):
        raise SingularKernelPoint("p lies on the sphere [-conj(q)]")
    qb = qconj(Q)
    den = qreal(qnorm2(P)) + 2.0 * P[..., :1] * qb + qmul(qb, qb)
    return qmul(qconj(P) + qb, qinv(den))


def k_eval_alt_many(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    P, Q = np.broadcast_arrays(np.asarray(P, float), np.asarray(Q, float))
    den = qreal(qnorm2(Q)) + 2.0 * Q[..., :1] * P + qmul(P, P)
    return qmul(qinv(den), P + Q)


def k_identity_residual_many(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    k = k_eval_many(P, Q)
    r = qmul(np.broadcast_to(P, k.shape), k) + qmul(k, qconj(np.broadcast_to(Q, k.shape)))
    r[..., 0] -= 1.0
    return np.sqrt(qnorm2(r))


def stein_solve(R: QMatrix, p, q) -> QMatrix:
    """Solve ``p X + X conj(q) = R`` entrywise.

    ``X = (conj(p) R + R conj(q)) (|p|^2 + 2 Re(p) conj(q) + conj(q)^2)^{-1}``.
    """
    p, q = Quaternion.of(p), Quaternion.of(q)
    _check_sphere(p, q)
    den = _stein_denominator(p, q)
    if abs(den) <= DEN_TOL:
        raise SingularKernelPoint("kernel denominator vanishes")
    return (R.lmul(p.conj()) + R.rmul(q.conj())).rmul(den.inverse())


# ---------------------------------------------------------------------------
# Kernel descriptions
# ---------------------------------------------------------------------------

def _is_signature_matrix(J: QMatrix, tol: float = 1e-12) -> bool:
    if J.rows != J.cols:
        return False
    real = np.abs(J.c1.imag).max(initial=0.0) <= tol and np.abs(J.c2).max(initial=0.0) <= tol
    return real and qdiff(J, J.H) <= tol and qdiff(J @ J, QMatrix.eye(J.rows)) <= tol


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind
    J1: QMatrix = field(default_factory=lambda: QMatrix.eye(1))
    J2: QMatrix = field(default_factory=lambda: QMatrix.eye(1))
    func: SliceFunction | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        for J in (self.J1, self.J2):
            if not _is_signature_matrix(J):
                raise DomainError("J1, J2 must be real signature matrices")
        if self.kind is KernelKind.SCHUR_KS:
            if self.func is None:
                raise DomainError("SCHUR_KS needs a function")
            if signature(self.J1).nu_minus != signature(self.J2).nu_minus:
                raise DomainError("J1 and J2 must have the same number of negative squares")
        if self.kind is KernelKind.GP_KPHI and self.func is None:
            raise DomainError("GP_KPHI needs a function")

    @property
    def size(self) -> int:
        """Dimension of the kernel values."""
        return 1 if self.kind is KernelKind.HARDY_K else self.J2.rows

    @property
    def quaternionic(self) -> bool:
        return self.kind is KernelKind.HARDY_K or self.func.quaternionic

    @classmethod
    def hardy(cls) -> "KernelSpec":
        return cls(KernelKind.HARDY_K)

    @classmethod
    def negative_hardy(cls) -> "KernelSpec":
        """``-k`` written as the Schur kernel of ``S = 0`` with ``J1 = J2 = -1``."""
        minus = QMatrix.real([[-1.0]])
        return cls(KernelKind.SCHUR_KS, minus, minus, SliceFunction.constant(QMatrix.zeros(1, 1), "zero"))

    @classmethod
    def schur(cls, func: SliceFunction, J1: QMatrix | None = None, J2: QMatrix | None = None) -> "KernelSpec":
        probe = _probe(func)
        J1 = J1 if J1 is not None else QMatrix.eye(probe.cols)
        J2 = J2 if J2 is not None else QMatrix.eye(probe.rows)
        return cls(KernelKind.SCHUR_KS, J1, J2, func)

    @classmethod
    def gp(cls, func: SliceFunction, J: QMatrix | None = None) -> "KernelSpec":
        J = J if J is not None else QMatrix.eye(_probe(func).rows)
        return cls(KernelKind.GP_KPHI, J, J, func)


def _probe(func: SliceFunction) -> QMatrix:
    """A sample value, used only to read off the shape."""
    for x in (1.0, 1.7320508075688772, 2.718281828459045):
        try:
            return func(Quaternion(x))
        except Exception:  # noqa: BLE001 - a pole at a probe just means try the next
            continue
    raise DomainError("function could not be evaluated at any probe point")


def _require_evaluable(spec: KernelSpec, p: Quaternion, q: Quaternion) -> None:
    if not spec.quaternionic and not (p.is_real() and q.is_real()):
        raise UnsupportedEvaluation("this function is only evaluated at real points")


def _rhs(spec: KernelSpec, Sp: QMatrix, Sq: QMatrix) -> QMatrix:
    if spec.kind is KernelKind.SCHUR_KS:
        return spec.J2 - Sp @ spec.J1 @ Sq.H
    return spec.J1 @ Sp + Sq.H @ spec.J1


def schur_kernel_eval(spec: KernelSpec, p, q) -> QMatrix:
    """``K_S(p, q)``; at real ``x, y`` this is ``(J2 - S(x) J1 S(y)^*) / (x + y)``."""
    if spec.kind is not KernelKind.SCHUR_KS:
        raise DomainError("spec is not a Schur kernel")
    p, q = Quaternion.of(p), Quaternion.of(q)
    _require_evaluable(spec, p, q)
    return stein_solve(_rhs(spec, spec.func(p), spec.func(q)), p, q)


def gp_kernel_eval(spec: KernelSpec, p, q) -> QMatrix:
    """``K_Phi(p, q)``; at real ``x, y`` this is ``(J Phi(x) + Phi(y)^* J) / (x + y)``."""
    if spec.kind is not KernelKind.GP_KPHI:
        raise DomainError("spec is not a generalized-positive kernel")
    p, q = Quaternion.of(p), Quaternion.of(q)
    _require_evaluable(spec, p, q)
    return stein_solve(_rhs(spec, spec.func(p), spec.func(q)), p, q)


def kernel_eval(spec: KernelSpec, p, q) -> QMatrix:
    if spec.kind is KernelKind.HARDY_K:
        return QMatrix.scalar(k_eval(p, q))
    if spec.kind is KernelKind.SCHUR_KS:
        return schur_kernel_eval(spec, p, q)
    return gp_kernel_eval(spec, p, q)


def kernel_closed_form(spec: KernelSpec, p, q) -> QMatrix:
    """``G(p) G(q)^*`` from the function's kernel factor, when it has one."""
    if spec.func is None or spec.func.kernel_factor is None:
        raise UnsupportedEvaluation("no closed-form kernel factor available")
    return spec.func.kernel_factor(Quaternion.of(p)) @ spec.func.kernel_factor(Quaternion.of(q)).H


# ---------------------------------------------------------------------------
# Gram matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GramSpec:
    points: tuple
    vectors: tuple | None = None
    seed: int | None = None

    def __post_init__(self):
        pts = tuple(Quaternion.of(p) for p in self.points)
        if not pts:
            raise DomainError("a Gram matrix needs at least one point")
        if any(p.w <= 0 for p in pts):
            raise DomainError("Gram points must lie in the right half-space")
        object.__setattr__(self, "points", pts)
        if self.vectors is not None:
            vecs = tuple(v if isinstance(v, QMatrix) else QMatrix.scalar(v) for v in self.vectors)
            if len(vecs) != len(pts) or any(v.cols != 1 for v in vecs):
                raise DomainError("one column vector per point is required")
            object.__setattr__(self, "vectors", vecs)


def _values(spec: KernelSpec, points: Sequence[Quaternion]) -> list:
    if spec.kind is KernelKind.HARDY_K:
        return [None] * len(points)
    if not spec.quaternionic and not all(p.is_real() for p in points):
        raise UnsupportedEvaluation("this function is only evaluated at real points")
    return [spec.func(p) for p in points]


def kernel_block_matrix(spec: KernelSpec, points: Sequence[Quaternion]) -> list:
    """All kernel values ``K(w_u, w_v)`` as a nested list, reusing function values."""
    points = [Quaternion.of(p) for p in points]
    if spec.kind is KernelKind.HARDY_K:
        arr = np.array(points, dtype=float)
        kk = k_eval_many(arr[:, None, :], arr[None, :, :])
        return [[QMatrix.from_array(kk[u, v]) for v in range(len(points))] for u in range(len(points))]
    vals = _values(spec, points)
    return [
        [stein_solve(_rhs(spec, vals[u], vals[v]), points[u], points[v]) for v in range(len(points))]
        for u in range(len(points))
    ]


def gram_matrix_raw(spec: KernelSpec, g: GramSpec) -> QMatrix:
    blocks = kernel_block_matrix(spec, g.points)
    n = len(g.points)
    if g.vectors is None:
        return QMatrix.block(blocks)
    out = QMatrix.zeros(n, n)
    for u in range(n):
        cu = g.vectors[u].H
        for v in range(n):
            e = cu @ blocks[u][v] @ g.vectors[v]
            out.c1[u, v], out.c2[u, v] = e.c1[0, 0], e.c2[0, 0]
    return out


def gram_matrix(spec: KernelSpec, g: GramSpec, tol: float = 1e-10) -> QMatrix:
    """Hermitian Gram matrix with entries ``c_u^* K(w_u, w_v) c_v``.

    Without vectors the full block matrix ``[K(w_u, w_v)]`` is returned.
    """
    G = gram_matrix_raw(spec, g)
    scale = max(1.0, G.max_abs())
    if qdiff(G, G.H) > tol * scale:
        raise DomainError("kernel Gram matrix is not Hermitian; the kernel is inconsistent")
    return (G + G.H) * 0.5


def gram_eigenvalues(G: QMatrix) -> np.ndarray:
    """Spectrum of a Hermitian quaternionic matrix, one value per pair of chi."""
    return hermitian_eigenvalues(chi_embed(G))[0::2]


# ---------------------------------------------------------------------------
# Negative squares
# ---------------------------------------------------------------------------

class KappaEstimate(NamedTuple):
    kappa_hat: int
    trials: int
    max_gram_size: int
    per_trial: tuple = ()
    spectra: tuple = ()


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    # one stream per trial: extending the trial count never changes earlier samples
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, trial])


def sample_gram_spec(spec: KernelSpec, n_points: int, rng: np.random.Generator) -> GramSpec:
    if spec.quaternionic:
        pts = random_halfspace_points(rng, n_points)
    else:
        pts = np.zeros((n_points, 4))
        pts[:, 0] = rng.uniform(0.2, 3.0, size=n_points)
    vecs = [QMatrix.random(rng, spec.size, 1) for _ in range(n_points)]
    return GramSpec(tuple(Quaternion(*row) for row in pts), tuple(vecs))


def estimate_negative_squares(
    spec: KernelSpec, trials: int, max_points: int, seed: int, tol: float = 1e-10
) -> KappaEstimate:
    if trials < 1 or max_points < 1:
        raise DomainError("trials and max_points must be at least 1")
    counts, spectra = [], []
    for t in range(trials):
        g = sample_gram_spec(spec, max_points, _trial_rng(seed, t))
        sig, eigs = signature_and_spectrum(gram_matrix(spec, g), tol)
        counts.append(sig.nu_minus)
        spectra.append(eigs[0::2])
    return KappaEstimate(max(counts), trials, max_points, tuple(counts), tuple(spectra))


class CongruenceCheck(NamedTuple):
    kappa_before: int
    kappa_after: int


def congruence_kappa_check(spec: KernelSpec, alpha: PowerSeries, g: GramSpec, tol: float = 1e-10) -> CongruenceCheck:
    """Negative squares of the block Gram of ``K`` and of ``alpha(p) K(p, q) alpha(q)^*``.

    Works at real points, where the star products are pointwise; points at
    which ``alpha`` is singular are dropped with a warning.
    """
    if any(not p.is_real() for p in g.points):
        raise DomainError("congruence check is restricted to real points")
    kept, alphas = [], []
    for p in g.points:
        a = ps_eval(alpha, p)
        try:
            qmat_inverse(a)
        except SingularMatrix:
            warnings.warn(f"alpha is singular at {p.w}; point dropped", RuntimeWarning, stacklevel=2)
            continue
        kept.append(p)
        alphas.append(a)
    if not kept:
        raise DomainError("alpha is singular at every sample point")
    blocks = kernel_block_matrix(spec, kept)
    after = [[alphas[u] @ blocks[u][v] @ alphas[v].H for v in range(len(kept))] for u in range(len(kept))]
    G0, G1 = QMatrix.block(blocks), QMatrix.block(after)
    G0 = (G0 + G0.H) * 0.5
    G1 = (G1 + G1.H) * 0.5
    return CongruenceCheck(signature(G0, tol).nu_minus, signature(G1, tol).nu_minus)


# ---------------------------------------------------------------------------
# Potapov-Ginzburg transform at real points
# ---------------------------------------------------------------------------

def _pg_blocks(S: QMatrix, split: tuple[int, int]):
    r1, c1 = split
    if not (0 <= r1 <= S.rows and 0 <= c1 <= S.cols) or S.rows - r1 != S.cols - c1:
        raise DomainError("split must leave a square S22 block")
    return S[:r1, :c1], S[:r1, c1:], S[r1:, :c1], S[r1:, c1:]


def pg_transform(S_value: QMatrix, split: tuple[int, int]) -> QMatrix:
    """Potapov-Ginzburg transform of a value ``S(x)`` split as ``[[S11, S12], [S21, S22]]``.

    ``Sigma = [[S11 - S12 S22^-1 S21, -S12 S22^-1], [S22^-1 S21, S22^-1]]``, the
    sign choice under which ``A(x) = [[I, S12], [0, S22]]`` factors the kernel
    (see :func:`perlette_residual`); the map is an involution.
    """
    S11, S12, S21, S22 = _pg_blocks(S_value, split)
    try:
        inv = qmat_inverse(S22)
    except SingularMatrix as exc:
        raise SingularBlock("S22 is not invertible") from exc
    return QMatrix.block([[S11 - S12 @ inv @ S21, -(S12 @ inv)], [inv @ S21, inv]])


def pg_factor(S_value: QMatrix, split: tuple[int, int]) -> QMatrix:
    S11, S12, S21, S22 = _pg_blocks(S_value, split)
    r1 = split[0]
    return QMatrix.block([[QMatrix.eye(r1), S12], [QMatrix.zeros(S22.rows, r1), S22]])


def perlette_residual(Sx: QMatrix, Sy: QMatrix, x: float, y: float, split: tuple[int, int]) -> float:
    """Max-entry gap between ``K_S(x, y)`` and ``A(x)(k - Sigma(x) k Sigma(y)^*)A(y)^*`` at real points."""
    r1, c1 = split
    m = Sx.rows - r1
    J2, J1 = signature_matrix(r1, m), signature_matrix(c1, m)
    lhs = (J2 - Sx @ J1 @ Sy.H) * (1.0 / (x + y))
    Sgx, Sgy = pg_transform(Sx, split), pg_transform(Sy, split)
    inner = (QMatrix.eye(Sgx.rows) - Sgx @ Sgy.H) * (1.0 / (x + y))
    rhs = pg_factor(Sx, split) @ inner @ pg_factor(Sy, split).H
    return qdiff(lhs, rhs)
