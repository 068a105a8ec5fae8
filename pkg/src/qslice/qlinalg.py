"""Quaternionic matrices through the complex adjoint embedding.

A quaternionic matrix ``A`` is stored as the complex pair ``(A1, A2)`` with
``A = A1 + A2 j``; then ``chi(A) = [[A1, A2], [-conj(A2), conj(A1)]]`` is a
multiplicative, adjoint-preserving embedding into complex matrices, and
every spectral question (eigencounts, square roots, inverses) is answered
on the complex side.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateSpectrum,
    DomainError,
    NotPSD,
    SingularMatrix,
    SolverError,
    StructureViolation,
)
from .quat import Quaternion

EPS = np.finfo(float).eps
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 64
PAIR_TOL = 1e-8


def _split(q) -> tuple[complex, complex]:
    q = Quaternion.of(q)
    return complex(q.w, q.x), complex(q.y, q.z)


class QMatrix:
    """Rectangular matrix over the quaternions.

    Entry ``w + x i + y j + z k`` is held as ``c1 = w + x i`` and
    ``c2 = y + z i`` in two complex arrays of identical shape.
    """

    __slots__ = ("c1", "c2")
    __array_priority__ = 100

    def __init__(self, c1, c2=None):
        c1 = np.atleast_2d(np.asarray(c1, dtype=complex))
        c2 = np.zeros_like(c1) if c2 is None else np.atleast_2d(np.asarray(c2, dtype=complex))
        if c1.shape != c2.shape or c1.ndim != 2:
            raise DomainError("QMatrix parts must be 2-d arrays of equal shape")
        self.c1 = c1
        self.c2 = c2

    # -- construction --------------------------------------------------------
    @classmethod
    def from_array(cls, arr) -> "QMatrix":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(1, 1, 4)
        if arr.ndim != 3 or arr.shape[-1] != 4:
            raise DomainError("expected an array of shape (rows, cols, 4)")
        return cls(arr[..., 0] + 1j * arr[..., 1], arr[..., 2] + 1j * arr[..., 3])

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence]) -> "QMatrix":
        data = [[Quaternion.of(e) for e in row] for row in rows]
        return cls.from_array(np.array(data, dtype=float))

    @classmethod
    def scalar(cls, q) -> "QMatrix":
        a, b = _split(q)
        return cls([[a]], [[b]])

    @classmethod
    def real(cls, m) -> "QMatrix":
        m = np.atleast_2d(np.asarray(m, dtype=float))
        return cls(m.astype(complex))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls(np.zeros((rows, cols), dtype=complex))

    @classmethod
    def eye(cls, n: int) -> "QMatrix":
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def diag(cls, entries: Sequence) -> "QMatrix":
        n = len(entries)
        out = cls.zeros(n, n)
        for k, e in enumerate(entries):
            out.c1[k, k], out.c2[k, k] = _split(e)
        return out

    @classmethod
    def random(cls, rng: np.random.Generator, rows: int, cols: int, scale: float = 1.0) -> "QMatrix":
        return cls.from_array(rng.normal(scale=scale, size=(rows, cols, 4)))

    @classmethod
    def block(cls, blocks: Sequence[Sequence["QMatrix"]]) -> "QMatrix":
        return cls(
            np.block([[b.c1 for b in row] for row in blocks]),
            np.block([[b.c2 for b in row] for row in blocks]),
        )

    @classmethod
    def from_json(cls, obj) -> "QMatrix":
        try:
            rows, cols = int(obj["rows"]), int(obj["cols"])
            data = np.asarray(obj["data"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed QMatrix JSON: {exc}") from exc
        if data.shape != (rows * cols, 4):
            raise DomainError("QMatrix JSON data length must equal rows*cols")
        return cls.from_array(data.reshape(rows, cols, 4))

    def to_json(self) -> dict:
        arr = self.to_array().reshape(-1, 4)
        return {"rows": self.rows, "cols": self.cols, "data": arr.tolist()}

    # -- inspection ----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.c1.shape

    @property
    def rows(self) -> int:
        return self.c1.shape[0]

    @property
    def cols(self) -> int:
        return self.c1.shape[1]

    def to_array(self) -> np.ndarray:
        return np.stack([self.c1.real, self.c1.imag, self.c2.real, self.c2.imag], axis=-1)

    def entry(self, r: int, c: int) -> Quaternion:
        a, b = self.c1[r, c], self.c2[r, c]
        return Quaternion(float(a.real), float(a.imag), float(b.real), float(b.imag))

    def item(self) -> Quaternion:
        if self.shape != (1, 1):
            raise DomainError("item() needs a 1x1 matrix")
        return self.entry(0, 0)

    def abs_entries(self) -> np.ndarray:
        return np.sqrt(np.abs(self.c1) ** 2 + np.abs(self.c2) ** 2)

    def max_abs(self) -> float:
        return float(self.abs_entries().max()) if self.c1.size else 0.0

    def copy(self) -> "QMatrix":
        return QMatrix(self.c1.copy(), self.c2.copy())

    def __getitem__(self, idx) -> "QMatrix":
        r, c = idx
        return QMatrix(np.atleast_2d(self.c1[r, c]), np.atleast_2d(self.c2[r, c]))

    def __repr__(self) -> str:
        return f"QMatrix({self.rows}x{self.cols}, {self.to_array().tolist()!r})"

    # -- algebra -------------------------------------------------------------
    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.c1 - other.c1, self.c2 - other.c2)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self.c1, -self.c2)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        # (A1 + A2 j)(B1 + B2 j) = (A1 B1 - A2 conj(B2)) + (A1 B2 + A2 conj(B1)) j
        if self.cols != other.rows:
            raise DomainError(f"shape mismatch {self.shape} @ {other.shape}")
        return QMatrix(
            self.c1 @ other.c1 - self.c2 @ other.c2.conj(),
            self.c1 @ other.c2 + self.c2 @ other.c1.conj(),
        )

    def __mul__(self, r):
        if isinstance(r, Quaternion):
            return self.rmul(r)
        return QMatrix(self.c1 * float(r), self.c2 * float(r))

    def __rmul__(self, r):
        if isinstance(r, Quaternion):
            return self.lmul(r)
        return QMatrix(self.c1 * float(r), self.c2 * float(r))

    def lmul(self, q) -> "QMatrix":
        """Multiply every entry by the quaternion ``q`` on the left."""
        a, b = _split(q)
        return QMatrix(a * self.c1 - b * self.c2.conj(), a * self.c2 + b * self.c1.conj())

    def rmul(self, q) -> "QMatrix":
        """Multiply every entry by the quaternion ``q`` on the right."""
        a, b = _split(q)
        return QMatrix(self.c1 * a - self.c2 * np.conj(b), self.c1 * b + self.c2 * np.conj(a))

    @property
    def H(self) -> "QMatrix":
        return QMatrix(self.c1.conj().T, -self.c2.T)

    def adjoint(self) -> "QMatrix":
        return self.H

    def conj_entries(self) -> "QMatrix":
        return QMatrix(self.c1.conj(), -self.c2)

    def trace_real(self) -> float:
        return float(np.trace(self.c1).real)


def qdiff(a: QMatrix, b: QMatrix) -> float:
    """Max-entry modulus of ``a - b``."""
    return (a - b).max_abs()


def is_hermitian(A: QMatrix, tol: float) -> bool:
    return A.rows == A.cols and qdiff(A, A.H) <= tol


def block_diag(*mats: QMatrix) -> QMatrix:
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = QMatrix.zeros(rows, cols)
    r = c = 0
    for m in mats:
        out.c1[r:r + m.rows, c:c + m.cols] = m.c1
        out.c2[r:r + m.rows, c:c + m.cols] = m.c2
        r += m.rows
        c += m.cols
    return out


def signature_matrix(n_plus: int, n_minus: int) -> QMatrix:
    return QMatrix.real(np.diag([1.0] * n_plus + [-1.0] * n_minus))


# ---------------------------------------------------------------------------
# The complex adjoint embedding
# ---------------------------------------------------------------------------

def chi_embed(A: QMatrix) -> np.ndarray:
    return np.block([[A.c1, A.c2], [-A.c2.conj(), A.c1.conj()]])


def chi_structure_residual(M: np.ndarray) -> float:
    m, n = M.shape[0] // 2, M.shape[1] // 2
    if M.size == 0:
        return 0.0
    r1 = np.abs(M[m:, :n] + M[:m, n:].conj()).max()
    r2 = np.abs(M[m:, n:] - M[:m, :n].conj()).max()
    return float(max(r1, r2))


def chi_extract(M: np.ndarray, tol: float = 1e-10, return_residual: bool = False):
    """Invert :func:`chi_embed` on a block-structured complex matrix."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] % 2 or M.shape[1] % 2:
        raise StructureViolation("embedded matrices have even dimensions")
    m, n = M.shape[0] // 2, M.shape[1] // 2
    residual = chi_structure_residual(M)
    if residual > tol:
        raise StructureViolation(f"chi block symmetry violated by {residual:.3e}")
    A = QMatrix(0.5 * (M[:m, :n] + M[m:, n:].conj()), 0.5 * (M[:m, n:] - M[m:, :n].conj()))
    return (A, residual) if return_residual else A


def embed_vector(u: QMatrix) -> np.ndarray:
    """Column vector ``u1 + u2 j`` as the complex vector ``[u1; -conj(u2)]``."""
    return np.concatenate([u.c1[:, 0], -u.c2[:, 0].conj()])


def extract_vector(v: np.ndarray) -> QMatrix:
    n = v.shape[0] // 2
    return QMatrix(v[:n, None], -v[n:, None].conj())


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigensolver for complex Hermitian matrices
# ---------------------------------------------------------------------------

def _round_robin(m: int) -> list[np.ndarray]:
    """Slot orders for the circle method on an even ``m``.

    In each order, slots ``(2k, 2k+1)`` form the pairs rotated together; over
    the ``m - 1`` orders every pair of indices meets exactly once.
    """
    players = list(range(m))
    orders = []
    for _ in range(m - 1):
        slots = []
        for k in range(m // 2):
            slots += [players[k], players[m - 1 - k]]
        orders.append(np.array(slots, dtype=int))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return orders


_SCHEDULES: dict[int, tuple] = {}


def _schedule(m: int) -> tuple:
    """Relative permutations taking one slot order to the next, cyclically."""
    if m not in _SCHEDULES:
        orders = _round_robin(m)
        rel = []
        for a, b in zip(orders, orders[1:] + orders[:1]):
            inv = np.empty(m, dtype=int)
            inv[a] = np.arange(m)
            perm = inv[b]
            rel.append((perm, perm[:, None] * m + perm[None, :]))
        _SCHEDULES[m] = (orders[0], rel)
    return _SCHEDULES[m]


def _rotate_columns(X: np.ndarray, R: np.ndarray) -> np.ndarray:
    """``X @ blockdiag(R_k)`` for 2x2 blocks on adjacent column pairs."""
    X3 = X.reshape(X.shape[0], -1, 2)
    return (X3[:, :, 0, None] * R[:, 0, :] + X3[:, :, 1, None] * R[:, 1, :]).reshape(X.shape)


def jacobi_eigh(M: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS, vectors: bool = True):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.

    Cyclic Jacobi with the round-robin ordering: the matrix is kept with the
    current pairs in adjacent slots, so one round is a batch of 2x2 complex
    rotations applied to reshaped rows and columns.  Convergence is declared
    when the off-diagonal Frobenius norm falls below ``tol`` times the
    Frobenius norm of the input.  With ``vectors=False`` no eigenvectors are
    accumulated and ``None`` is returned in their place.
    """
    A0 = np.array(M, dtype=complex)
    n = A0.shape[0]
    if A0.ndim != 2 or A0.shape[1] != n:
        raise DomainError("hermitian_eigenvalues needs a square matrix")
    scale = np.linalg.norm(A0)
    if np.abs(A0 - A0.conj().T).max(initial=0.0) > 1e-10 * max(1.0, scale):
        raise DomainError("matrix is not Hermitian within 1e-10")
    A0 = 0.5 * (A0 + A0.conj().T)
    if n <= 1:
        return A0.diagonal().real.copy(), (np.eye(n, dtype=complex) if vectors else None)
    m = n + (n % 2)
    pad = np.zeros((m, m), dtype=complex)
    pad[:n, :n] = A0  # an odd size gets an isolated zero index that never rotates
    first, rel = _schedule(m)
    cur = first.copy()
    A = pad[np.ix_(cur, cur)]
    V = np.eye(m, dtype=complex)[:, cur] if vectors else None
    h = m // 2
    idx = np.arange(0, m, 2)
    converged = False
    off_mask = ~np.eye(m, dtype=bool)
    # pivots below this are left alone: together they stay under half the stopping
    # threshold, and rotating rounding-level entries of a tight cluster only churns
    skip = max(1e-300, 0.5 * tol * scale / m)
    for _ in range(max_sweeps):
        off2 = np.sum(np.abs(A[off_mask]) ** 2)
        if off2 <= (tol * scale) ** 2 or scale == 0.0:
            converged = True
            break
        for perm, flat in rel:
            apq = A[idx, idx + 1]
            mag = np.abs(apq)
            active = mag > skip
            if active.any():
                safe = np.where(active, mag, 1.0)
                phase = np.where(active, apq / safe, 1.0)
                zeta = (A[idx + 1, idx + 1].real - A[idx, idx].real) / (2.0 * safe)
                sgn = np.where(zeta >= 0.0, 1.0, -1.0)
                t = np.where(active, sgn / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta)), 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * c
                e = phase.conj()
                R = np.empty((h, 2, 2), dtype=complex)
                R[:, 0, 0], R[:, 0, 1], R[:, 1, 0], R[:, 1, 1] = c, sn, -sn * e, c * e
                # A <- R^H A R, V <- V R, with R block diagonal in slot order
                A = _rotate_columns(A, R)
                A = _rotate_columns(A.T, R.conj()).T
                if vectors:
                    V = _rotate_columns(V, R)
            A = A.take(flat)
            if vectors:
                V = V[:, perm]
            cur = cur[perm]
    if not converged:
        off2 = np.sum(np.abs(A[off_mask]) ** 2)
        if off2 > (tol * scale) ** 2:
            off = math.sqrt(max(off2, 0.0))
            raise SolverError(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")
    w = A.diagonal().real
    keep = cur < n
    w = w[keep]
    order = np.argsort(w, kind="stable")
    if not vectors:
        return w[order], None
    return w[order], V[:n][:, keep][:, order]


def hermitian_eigenvalues(M: np.ndarray) -> np.ndarray:
    return jacobi_eigh(M, vectors=False)[0]


def eigen_residuals(M: np.ndarray) -> np.ndarray:
    """``||M v - lambda v||`` for every computed eigenpair."""
    w, V = jacobi_eigh(M)
    return np.linalg.norm(np.asarray(M) @ V - V * w, axis=0)


# ---------------------------------------------------------------------------
# Signatures and factorizations
# ---------------------------------------------------------------------------

class Signature(NamedTuple):
    nu_plus: int
    nu_minus: int
    nu_zero: int

    @property
    def dim(self) -> int:
        return self.nu_plus + self.nu_minus + self.nu_zero


def _check_hermitian(A: QMatrix, tol: float) -> None:
    if A.rows != A.cols:
        raise DomainError("matrix must be square")
    if qdiff(A, A.H) > tol * max(1.0, A.max_abs()):
        raise DomainError("matrix is not Hermitian within tolerance")


def zero_threshold(eigs: np.ndarray, tol: float) -> float:
    big = float(np.abs(eigs).max(initial=0.0))
    return max(eigs.size * EPS * big, tol)


def signature(A: QMatrix, tol: float = 1e-10) -> Signature:
    """Inertia of a quaternionic Hermitian matrix via the doubled spectrum of chi(A)."""
    return signature_and_spectrum(A, tol)[0]


def signature_and_spectrum(A: QMatrix, tol: float = 1e-10) -> tuple[Signature, np.ndarray]:
    """Inertia together with the full (doubled, ascending) spectrum of chi(A)."""
    _check_hermitian(A, tol)
    if A.rows == 0:
        return Signature(0, 0, 0), np.zeros(0)
    eigs = hermitian_eigenvalues(chi_embed(A))
    big = float(np.abs(eigs).max(initial=0.0))
    gaps = np.abs(eigs[0::2] - eigs[1::2])
    if np.any(gaps > PAIR_TOL * big):
        raise DegenerateSpectrum(f"chi eigenvalues do not pair (max gap {gaps.max():.3e})")
    tau = zero_threshold(eigs, tol)
    plus = int(np.sum(eigs > tau))
    minus = int(np.sum(eigs < -tau))
    zero = eigs.size - plus - minus
    if plus % 2 or minus % 2:
        raise DegenerateSpectrum("odd eigencount after thresholding; tolerance too aggressive")
    return Signature(plus // 2, minus // 2, zero // 2), eigs


def qmat_inverse(A: QMatrix, cond_limit: float = 1e13) -> QMatrix:
    if A.rows != A.cols:
        raise DomainError("only square matrices are invertible")
    M = chi_embed(A)
    if A.rows == 0:
        return A.copy()
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularMatrix(f"matrix is singular within tolerance (cond={cond:.3e})")
    inv = np.linalg.inv(M)
    tol = max(1e-12, 1e3 * cond * EPS) * max(1.0, float(np.abs(inv).max()))
    return chi_extract(inv, tol=tol)


def solve_right(X: QMatrix, A: QMatrix) -> QMatrix:
    """Return ``X A^{-1}``."""
    return X @ qmat_inverse(A)


def psd_sqrt(A: QMatrix, tol: float = 1e-10) -> QMatrix:
    _check_hermitian(A, tol)
    w, V = jacobi_eigh(chi_embed(A))
    if w.size and w.min() < -tol * max(1.0, np.abs(w).max()):
        raise NotPSD(f"negative eigenvalue {w.min():.3e}")
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    return chi_extract(root, tol=max(tol, 1e-8) * max(1.0, float(np.abs(root).max(initial=0.0))))


def antihermitian_rank_factor(Delta: QMatrix, tol: float = 1e-10):
    """Factor ``Delta = -C^* J C`` with ``J^* = -J``, ``J^2 = -I``.

    The positive spectrum of the Hermitian matrix ``-i chi(Delta)`` yields
    right eigenvectors ``Delta u = u (i mu)``; stacking ``sqrt(mu) u^*`` as the
    rows of ``C`` and taking ``J = -i I`` reproduces ``Delta``.
    """
    if Delta.rows != Delta.cols:
        raise DomainError("Delta must be square")
    scale = max(1.0, Delta.max_abs())
    if qdiff(Delta, -Delta.H) > tol * scale:
        raise DomainError("Delta is not anti-Hermitian")
    n = Delta.rows
    if n == 0:
        return QMatrix.zeros(0, 0), QMatrix.zeros(0, 0), 0
    w, V = jacobi_eigh(-1j * chi_embed(Delta))
    tau = zero_threshold(w, tol * scale)
    keep = np.nonzero(w > tau)[0]
    m = len(keep)
    if m == 0:
        return QMatrix.zeros(0, n), QMatrix.zeros(0, 0), 0
    rows = [extract_vector(V[:, k]).H * float(np.sqrt(w[k])) for k in keep]
    C = QMatrix.block([[r] for r in rows])
    J = QMatrix.eye(m).lmul(Quaternion(0.0, -1.0, 0.0, 0.0))
    return C, J, m


# ---------------------------------------------------------------------------
# Random test matrices
# ---------------------------------------------------------------------------

def random_antihermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> QMatrix:
    M = QMatrix.random(rng, n, n, scale)
    return (M - M.H) * 0.5


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> QMatrix:
    M = QMatrix.random(rng, n, n, scale)
    return (M + M.H) * 0.5


def cayley(X: QMatrix) -> QMatrix:
    """``(I - X)^{-1} (I + X)``; unitary for anti-Hermitian ``X``."""
    eye = QMatrix.eye(X.rows)
    return qmat_inverse(eye - X) @ (eye + X)


def random_unitary(rng: np.random.Generator, n: int) -> QMatrix:
    return cayley(random_antihermitian(rng, n))


def random_j_unitary(rng: np.random.Generator, metric: QMatrix, scale: float = 0.5) -> QMatrix:
    """Random ``U`` with ``U metric U^* = metric`` for a real signature ``metric``."""
    X = metric @ random_antihermitian(rng, metric.rows, scale)
    return cayley(X)
