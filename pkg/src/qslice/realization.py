"""State-space realizations of Schur and generalized-positive functions.

Everything reduces to two slice extensions of matrix resolvents:

* ``resolvent_star(G, A, p)`` extends ``x -> G (I - x A)^{-1}``,
* ``affine_resolvent_star(C, T, p)`` extends ``x -> C (x I - T)^{-1}``,

both written with the second-order pencils ``I - 2 Re(p) A + |p|^2 A^2`` and
``|p|^2 I - 2 Re(p) T + T^2``, which are real polynomials in a matrix and
therefore commute with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EvaluationSingular, ResolventSingular, SingularBlock, SingularMatrix
from .qlinalg import (
    QMatrix,
    block_diag,
    chi_embed,
    qdiff,
    qmat_inverse,
    random_antihermitian,
    random_j_unitary,
    random_unitary,
    signature,
    signature_matrix,
)
from .quat import Quaternion, random_unit_imaginary
from .slicefn import SliceFunction

COF_TOL = 1e-10


# ---------------------------------------------------------------------------
# Spectra and resolvents
# ---------------------------------------------------------------------------

def s_spectrum(A: QMatrix) -> list:
    """Sphere representatives ``x + i y`` (``y >= 0``) of the S-spectrum, with multiplicity."""
    if A.rows != A.cols:
        raise DomainError("S-spectrum needs a square matrix")
    if A.rows == 0:
        return []
    eig = np.linalg.eigvals(chi_embed(A))
    keyed = sorted((float(l.real), abs(float(l.imag))) for l in eig)
    return [Quaternion(x, y, 0.0, 0.0) for x, y in keyed[0::2]]


def _pencil_inverse(P: QMatrix, exc=ResolventSingular) -> QMatrix:
    try:
        return qmat_inverse(P)
    except SingularMatrix as err:
        raise exc("second-order pencil is singular at this point") from err


def resolvent_star(Gmap: QMatrix, A: QMatrix, p) -> QMatrix:
    """``(G - conj(p) G A)(I - 2 Re(p) A + |p|^2 A^2)^{-1}``, the extension of ``G (I - x A)^{-1}``."""
    p = Quaternion.of(p)
    n = A.rows
    pencil = QMatrix.eye(n) - A * (2.0 * p.w) + (A @ A) * p.norm2()
    return (Gmap - (Gmap @ A).lmul(p.conj())) @ _pencil_inverse(pencil)


def affine_resolvent_star(Cmap: QMatrix, T: QMatrix, p) -> QMatrix:
    """``(conj(p) C - C T)(|p|^2 I - 2 Re(p) T + T^2)^{-1}``, the extension of ``C (x I - T)^{-1}``."""
    p = Quaternion.of(p)
    n = T.rows
    pencil = QMatrix.eye(n) * p.norm2() - T * (2.0 * p.w) + T @ T
    return (Cmap.lmul(p.conj()) - Cmap @ T) @ _pencil_inverse(pencil)


def right_s_resolvent(T: QMatrix, p) -> QMatrix:
    """``S_R^{-1}(p, T) = -(T - conj(p) I)(T^2 - 2 Re(p) T + |p|^2 I)^{-1}``."""
    p = Quaternion.of(p)
    n = T.rows
    pencil = T @ T - T * (2.0 * p.w) + QMatrix.eye(n) * p.norm2()
    return -((T - QMatrix.eye(n).lmul(p.conj())) @ _pencil_inverse(pencil))


def _intrinsic_lambda(p: Quaternion, x0: float) -> Quaternion:
    # (p - x0)(p + x0)^{-1}; both factors lie in the slice of p and commute
    den = p + x0
    if abs(den) <= 1e-14:
        raise EvaluationSingular("p lies on the sphere [-x0]")
    return (p - x0) * den.inverse()


# ---------------------------------------------------------------------------
# Schur realizations centered at x0
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchurRealization:
    """``S(p) = H - (p - x0) G * ((x0 + p) I + (p - x0) B)^{-*} F``.

    ``state_metric`` is the signature matrix of the state space (identity
    when omitted); ``J1``, ``J2`` are the input and output metrics.
    """

    x0: float
    B: QMatrix
    F: QMatrix
    G: QMatrix
    H: QMatrix
    state_metric: QMatrix | None = None
    J1: QMatrix | None = None
    J2: QMatrix | None = None

    def __post_init__(self):
        if not self.x0 > 0:
            raise DomainError("x0 must be strictly positive")
        n = self.B.rows
        if self.B.cols != n or self.F.rows != n or self.G.cols != n:
            raise DomainError("state dimensions of B, F, G disagree")
        if self.H.shape != (self.G.rows, self.F.cols):
            raise DomainError("H must be (outputs x inputs)")
        object.__setattr__(self, "x0", float(self.x0))
        if self.state_metric is None:
            object.__setattr__(self, "state_metric", QMatrix.eye(n))
        if self.J1 is None:
            object.__setattr__(self, "J1", QMatrix.eye(self.F.cols))
        if self.J2 is None:
            object.__setattr__(self, "J2", QMatrix.eye(self.G.rows))

    @property
    def operator_matrix(self) -> QMatrix:
        return QMatrix.block([[self.B, self.F], [self.G, self.H]])

    @property
    def A(self) -> QMatrix:
        """The operator with ``B = -(I + x0 A)``."""
        return (QMatrix.eye(self.B.rows) + self.B) * (-1.0 / self.x0)

    @property
    def kappa(self) -> int:
        return signature(self.state_metric).nu_minus

    def __call__(self, p) -> QMatrix:
        return schur_eval(self, p)

    def to_json(self) -> dict:
        return {
            "x0": self.x0,
            "B": self.B.to_json(),
            "F": self.F.to_json(),
            "G": self.G.to_json(),
            "H": self.H.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "SchurRealization":
        try:
            extra = {k: QMatrix.from_json(obj[k]) for k in ("state_metric", "J1", "J2") if k in obj}
            return cls(
                float(obj.get("x0", 1.0)),
                QMatrix.from_json(obj["B"]),
                QMatrix.from_json(obj["F"]),
                QMatrix.from_json(obj["G"]),
                QMatrix.from_json(obj["H"]),
                **extra,
            )
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed realization JSON: {exc}") from exc


def schur_eval(r: SchurRealization, p, literal: bool = False) -> QMatrix:
    """Evaluate the realization at ``p`` through ``lambda = (p - x0)(p + x0)^{-1}``.

    ``S(p) = H - lambda (G + conj(lambda) G B)(I + 2 Re(lambda) B + |lambda|^2 B^2)^{-1} F``.
    With ``literal=True`` the prefactor is ``(p - x0)`` and the pencil is written
    in ``A`` with ``B = -(I + x0 A)``, as in the printed theorem; that variant
    agrees with the realization only at ``p = x0``.
    """
    p = Quaternion.of(p)
    lam = _intrinsic_lambda(p, r.x0)
    if literal:
        A = r.A
        n = A.rows
        pencil = (A @ A) * lam.norm2() - A * (2.0 * lam.w) + QMatrix.eye(n)
        head = r.G - (r.G @ A).lmul(lam.conj())
        return r.H - (head @ _pencil_inverse(pencil, EvaluationSingular) @ r.F).lmul(p - r.x0)
    try:
        core = resolvent_star(r.G, r.B, -lam)
    except ResolventSingular as exc:
        raise EvaluationSingular(str(exc)) from exc
    return r.H - (core @ r.F).lmul(lam)


def schur_real_axis(r: SchurRealization, x: float) -> QMatrix:
    """``H - (x - x0) G((x + x0) I + (x - x0) B)^{-1} F`` by plain matrix arithmetic."""
    n = r.B.rows
    P = QMatrix.eye(n) * (x + r.x0) + r.B * (x - r.x0)
    return r.H - (r.G @ qmat_inverse(P) @ r.F) * (x - r.x0)


def schur_state_map(r: SchurRealization, p) -> QMatrix:
    """``G * ((x0 + p) I + (p - x0) B)^{-*}``, the extension of ``G((x0 + x) I + (x - x0) B)^{-1}``."""
    p = Quaternion.of(p)
    lam = _intrinsic_lambda(p, r.x0)
    return resolvent_star(r.G, r.B, -lam).lmul((p + r.x0).inverse())


def schur_kernel_closed(r: SchurRealization, p, q) -> QMatrix:
    """``2 x0 Ghat(p) P Ghat(q)^*`` with ``P`` the state metric; equals ``K_S(p, q)``."""
    return (schur_state_map(r, p) @ r.state_metric @ schur_state_map(r, q).H) * (2.0 * r.x0)


def coisometry_residual(r: SchurRealization) -> float:
    """``|| M diag(P, J1) M^* - diag(P, J2) ||_max`` for ``M = [[B, F], [G, H]]``."""
    M = r.operator_matrix
    return qdiff(M @ block_diag(r.state_metric, r.J1) @ M.H, block_diag(r.state_metric, r.J2))


def schur_function(r: SchurRealization) -> SliceFunction:
    factor = None
    if qdiff(r.state_metric, QMatrix.eye(r.B.rows)) == 0.0:
        scale = math.sqrt(2.0 * r.x0)
        factor = lambda p: schur_state_map(r, p) * scale  # noqa: E731
    return SliceFunction(lambda p: schur_eval(r, p), True, factor, "schur-realization")


def blaschke_realization(a) -> SchurRealization:
    """Unitary realization at ``x0 = 1`` of the Blaschke factor ``b_a``."""
    a = Quaternion.of(a)
    if not a.w > 0:
        raise DomainError("Blaschke realization needs Re(a) > 0")
    inv = (1.0 + a.conj()).inverse()
    s = 2.0 * math.sqrt(a.w)
    return SchurRealization(
        1.0,
        QMatrix.scalar((1.0 - a.conj()) * inv),
        QMatrix.scalar(inv * s),
        QMatrix.scalar(inv * (-s)),
        QMatrix.scalar((1.0 - a) * inv),
    )


def random_schur_realization(
    rng: np.random.Generator,
    n: int,
    h1: int,
    h2: int | None = None,
    x0: float | None = None,
    state_metric: QMatrix | None = None,
    J: QMatrix | None = None,
) -> SchurRealization:
    """Random co-isometric (here unitary) realization for square ``h1 = h2``."""
    h2 = h1 if h2 is None else h2
    if h1 != h2:
        raise DomainError("random realizations are generated with h1 == h2")
    x0 = float(rng.uniform(0.5, 2.0)) if x0 is None else x0
    P = state_metric if state_metric is not None else QMatrix.eye(n)
    Jio = J if J is not None else QMatrix.eye(h1)
    metric = block_diag(P, Jio)
    if qdiff(metric, QMatrix.eye(n + h1)) == 0.0:
        M = random_unitary(rng, n + h1)
    else:
        M = random_j_unitary(rng, metric, scale=0.6)
    return SchurRealization(x0, M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:], P, Jio, Jio)


# ---------------------------------------------------------------------------
# Characteristic operator function
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class COFData:
    A: QMatrix
    C: QMatrix
    J: QMatrix

    def __post_init__(self):
        if self.A.rows != self.A.cols or self.C.rows != self.A.rows or self.J.shape != (self.C.cols, self.C.cols):
            raise DomainError("COF data shapes disagree")
        gap = qdiff(self.A + self.A.H, -(self.C @ self.J @ self.C.H))
        if gap > COF_TOL * max(1.0, self.A.max_abs()):
            raise DomainError(f"A + A^* != -C J C^* (residual {gap:.3e})")

    @classmethod
    def from_json(cls, obj) -> "COFData":
        try:
            return cls(QMatrix.from_json(obj["A"]), QMatrix.from_json(obj["C"]), QMatrix.from_json(obj["J"]))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed COF JSON: {exc}") from exc

    def to_json(self) -> dict:
        return {"A": self.A.to_json(), "C": self.C.to_json(), "J": self.J.to_json()}


def cof_state_map(d: COFData, p) -> QMatrix:
    """``C^* * (I - p A)^{-*}``."""
    return resolvent_star(d.C.H, d.A, p)


def cof_eval(d: COFData, p) -> QMatrix:
    """``S(p) = I - p C^* * (I - p A)^{-*} C J``."""
    p = Quaternion.of(p)
    m = d.C.cols
    return QMatrix.eye(m) - (cof_state_map(d, p) @ d.C @ d.J).lmul(p)


def cof_kernel(d: COFData, p, q) -> QMatrix:
    return cof_state_map(d, p) @ cof_state_map(d, q).H


def cof_identity_residual(d: COFData, p, q) -> float:
    """Gap in ``J - S(p) J S(q)^* = p K(p, q) + K(p, q) conj(q)``."""
    p, q = Quaternion.of(p), Quaternion.of(q)
    K = cof_kernel(d, p, q)
    lhs = d.J - cof_eval(d, p) @ d.J @ cof_eval(d, q).H
    return qdiff(lhs, K.lmul(p) + K.rmul(q.conj()))


def cof_function(d: COFData) -> SliceFunction:
    return SliceFunction(lambda p: cof_eval(d, p), True, lambda p: cof_state_map(d, p), "cof")


def random_cof(rng: np.random.Generator, n: int, m: int, n_minus: int | None = None) -> COFData:
    n_minus = int(rng.integers(0, m + 1)) if n_minus is None else n_minus
    J = signature_matrix(m - n_minus, n_minus)
    C = QMatrix.random(rng, n, m, scale=0.7)
    W = random_antihermitian(rng, n)
    return COFData(W - (C @ J @ C.H) * 0.5, C, J)


# ---------------------------------------------------------------------------
# Generalized positive functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GPBackwardShift:
    """``Phi(p) = D + p C * (I - p A)^{-*} B``."""

    A: QMatrix
    B: QMatrix
    C: QMatrix
    D: QMatrix

    def __post_init__(self):
        n = self.A.rows
        if self.A.cols != n or self.B.rows != n or self.C.cols != n or self.D.shape != (self.C.rows, self.B.cols):
            raise DomainError("GP quadruple shapes disagree")

    @property
    def operator_matrix(self) -> QMatrix:
        return QMatrix.block([[self.A, self.B], [self.C, self.D]])

    def __call__(self, p) -> QMatrix:
        return gp_backward_shift_eval(self, p)

    @classmethod
    def from_json(cls, obj) -> "GPBackwardShift":
        try:
            return cls(*(QMatrix.from_json(obj[k]) for k in ("A", "B", "C", "D")))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed GP JSON: {exc}") from exc

    def to_json(self) -> dict:
        return {k: getattr(self, k).to_json() for k in ("A", "B", "C", "D")}


def gp_backward_shift_eval(d: GPBackwardShift, p) -> QMatrix:
    p = Quaternion.of(p)
    return d.D + (resolvent_star(d.C, d.A, p) @ d.B).lmul(p)


def gp_real_part(d: GPBackwardShift) -> QMatrix:
    """``Re(M diag(I, -I))`` for ``M = [[A, B], [C, D]]``, i.e. ``(X + X^*)/2``."""
    n, m = d.A.rows, d.B.cols
    X = d.operator_matrix @ signature_matrix(n, m)
    return (X + X.H) * 0.5


def gp_function(d: GPBackwardShift) -> SliceFunction:
    return SliceFunction(lambda p: gp_backward_shift_eval(d, p), True, None, "gp-backward-shift")


def example_gp_star_inverse(a) -> GPBackwardShift:
    """Quadruple ``[[-a^-1, a^-1], [-a^-1, a^-1]]`` realizing ``(p + a)^{-*}`` for imaginary ``a``."""
    a = Quaternion.of(a)
    inv = a.inverse()
    return GPBackwardShift(
        QMatrix.scalar(-inv), QMatrix.scalar(inv), QMatrix.scalar(-inv), QMatrix.scalar(inv)
    )


def random_positive_gp(rng: np.random.Generator, n: int, m: int) -> GPBackwardShift:
    """Random quadruple with ``Re(M diag(I, -I)) <= 0``."""
    W = random_antihermitian(rng, n + m)
    P = QMatrix.random(rng, n + m, n + m, scale=0.4)
    X = W - P @ P.H
    M = X @ signature_matrix(n, m)
    return GPBackwardShift(M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:])


def realization_inverse(d: GPBackwardShift) -> GPBackwardShift:
    """Quadruple of the star inverse: ``(A - B D^-1 C, B D^-1, -D^-1 C, D^-1)``."""
    try:
        Di = qmat_inverse(d.D)
    except SingularMatrix as exc:
        raise SingularBlock("D is not invertible") from exc
    return GPBackwardShift(d.A - d.B @ Di @ d.C, d.B @ Di, -(Di @ d.C), Di)


def realization_product(d1: GPBackwardShift, d2: GPBackwardShift) -> GPBackwardShift:
    """Cascade realizing ``Phi1 * Phi2``."""
    if d1.D.cols != d2.D.rows:
        raise DomainError("realizations are not composable")
    n1, n2 = d1.A.rows, d2.A.rows
    A = QMatrix.block([[d1.A, d1.B @ d2.C], [QMatrix.zeros(n2, n1), d2.A]])
    B = QMatrix.block([[d1.B @ d2.D], [d2.B]])
    C = QMatrix.block([[d1.C, d1.D @ d2.C]])
    return GPBackwardShift(A, B, C, d1.D @ d2.D)


def identity_gp(m: int, n: int = 1) -> GPBackwardShift:
    return GPBackwardShift(QMatrix.zeros(n, n), QMatrix.zeros(n, m), QMatrix.zeros(m, n), QMatrix.eye(m))


@dataclass(frozen=True)
class GPRealization:
    """``Phi(p) = H - (p - x0) G * ((p + x0) I + (p - x0) B)^{-*} F`` with ``I + 2 x0 B`` unitary."""

    x0: float
    B: QMatrix
    F: QMatrix
    G: QMatrix
    H: QMatrix
    tol: float = 1e-10

    def __post_init__(self):
        if not self.x0 > 0:
            raise DomainError("x0 must be strictly positive")
        T = QMatrix.eye(self.B.rows) + self.B * (2.0 * self.x0)
        if qdiff(T @ T.H, QMatrix.eye(T.rows)) > self.tol:
            raise DomainError("I + 2 x0 B is not unitary")

    def as_schur(self) -> SchurRealization:
        return SchurRealization(self.x0, self.B, self.F, self.G, self.H)

    def __call__(self, p) -> QMatrix:
        return schur_eval(self.as_schur(), p)

    @classmethod
    def from_json(cls, obj) -> "GPRealization":
        r = SchurRealization.from_json(obj)
        return cls(r.x0, r.B, r.F, r.G, r.H)


def gp_realization_eval(r: GPRealization):
    """Evaluator for a generalized-positive realization centered at ``x0``."""
    s = r.as_schur()
    return lambda p: schur_eval(s, p)


def r1r1_residual(T: QMatrix, x0: float) -> float:
    """Gap in ``R + R^* = -2 x0 R^* R`` for ``R = (T - I)/(2 x0)``."""
    R = (T - QMatrix.eye(T.rows)) * (1.0 / (2.0 * x0))
    return qdiff(R + R.H, (R.H @ R) * (-2.0 * x0))


# ---------------------------------------------------------------------------
# Anti-self-adjoint pair model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairModel:
    """``T+ - T- = -C^* J C`` with ``T+``, ``T-`` anti-self-adjoint and ``J^* = -J``, ``J^2 = -I``."""

    Tp: QMatrix
    Tm: QMatrix
    C: QMatrix
    J: QMatrix
    tol: float = 1e-10

    def __post_init__(self):
        m, n = self.C.shape
        if self.Tp.shape != (n, n) or self.Tm.shape != (n, n) or self.J.shape != (m, m):
            raise DomainError("pair model shapes disagree")
        scale = max(1.0, self.Tp.max_abs(), self.Tm.max_abs())
        if qdiff(self.Tp, -self.Tp.H) > self.tol * scale or qdiff(self.Tm, -self.Tm.H) > self.tol * scale:
            raise DomainError("T+ and T- must be anti-self-adjoint")
        if qdiff(self.J, -self.J.H) > self.tol or qdiff(self.J @ self.J, -QMatrix.eye(m)) > self.tol:
            raise DomainError("J must satisfy J^* = -J and J^2 = -I")
        if qdiff(self.Tp - self.Tm, -(self.C.H @ self.J @ self.C)) > self.tol * scale:
            raise DomainError("T+ - T- != -C^* J C")

    @classmethod
    def from_json(cls, obj) -> "PairModel":
        try:
            return cls(*(QMatrix.from_json(obj[k]) for k in ("Tp", "Tm", "C", "J")))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed pair-model JSON: {exc}") from exc

    def to_json(self) -> dict:
        return {k: getattr(self, k).to_json() for k in ("Tp", "Tm", "C", "J")}


def pair_state_map(m: PairModel, p) -> QMatrix:
    return affine_resolvent_star(m.C, m.Tp, p)


def pair_phi_eval(m: PairModel, p) -> QMatrix:
    """``Phi(p) = J + C (p I - T+)^{-*} C^*``."""
    return m.J + pair_state_map(m, p) @ m.C.H


def pair_phi_inverse_eval(m: PairModel, p) -> QMatrix:
    """``Phi^{-*}(p) = -J - J C (p I - T-)^{-*} C^* J``."""
    return -m.J - m.J @ affine_resolvent_star(m.C, m.Tm, p) @ m.C.H @ m.J


def pair_function(m: PairModel) -> SliceFunction:
    return SliceFunction(lambda p: pair_phi_eval(m, p), True, lambda p: pair_state_map(m, p), "pair-model")


def pair_kernel_residual(m: PairModel, x: float, y: float) -> float:
    """Gap in ``Phi(x) + Phi(y)^* = x K + K y`` with ``K = C(x - T+)^{-1}(y - T+)^{-*} C^*``."""
    K = pair_state_map(m, x) @ pair_state_map(m, y).H
    return qdiff(pair_phi_eval(m, x) + pair_phi_eval(m, y).H, K * (x + y))


def random_pair_model(rng: np.random.Generator, n: int, m: int) -> PairModel:
    Tp = random_antihermitian(rng, n)
    C = QMatrix.random(rng, m, n, scale=0.7)
    J = QMatrix.diag([random_unit_imaginary(rng) for _ in range(m)])
    return PairModel(Tp, Tp + C.H @ J @ C, C, J)
