import math

import numpy as np
import pytest

from helpers import I, J, qclose
from qslice.blaschke import BlaschkeFactor
from qslice.errors import DomainError, SingularBlock
from qslice.kernels import GramSpec, KernelSpec, gram_eigenvalues, gram_matrix
from qslice.qlinalg import QMatrix, qdiff, qmat_inverse, random_unitary, signature, signature_matrix
from qslice.quat import Quaternion, random_halfspace_points
from qslice.slicefn import SliceFunction
from qslice.realization import (
    COFData,
    GPBackwardShift,
    GPRealization,
    PairModel,
    SchurRealization,
    affine_resolvent_star,
    blaschke_realization,
    cof_eval,
    cof_identity_residual,
    cof_kernel,
    coisometry_residual,
    example_gp_star_inverse,
    gp_backward_shift_eval,
    gp_function,
    gp_real_part,
    gp_realization_eval,
    identity_gp,
    pair_kernel_residual,
    pair_phi_eval,
    pair_phi_inverse_eval,
    r1r1_residual,
    random_cof,
    random_pair_model,
    random_positive_gp,
    random_schur_realization,
    realization_inverse,
    realization_product,
    resolvent_star,
    right_s_resolvent,
    s_spectrum,
    schur_eval,
    schur_kernel_closed,
    schur_real_axis,
)


def pts(rng, n):
    return [Quaternion(*p) for p in random_halfspace_points(rng, n)]


def test_s_spectrum_examples():
    assert s_spectrum(QMatrix.real(np.diag([2.0, 3.0]))) == [Quaternion(2.0), Quaternion(3.0)]
    (rep,) = s_spectrum(QMatrix.scalar(J))
    assert qclose(rep, I, 1e-15)
    assert s_spectrum(QMatrix.real([[-0.5]])) == [Quaternion(-0.5)]


def test_resolvent_examples(rng):
    A = QMatrix.random(rng, 3, 3, scale=0.3)
    G = QMatrix.random(rng, 2, 3)
    x = 0.7
    direct = G @ qmat_inverse(QMatrix.eye(3) - A * x)
    assert qdiff(resolvent_star(G, A, x), direct) <= 1e-13
    assert qdiff(resolvent_star(QMatrix.eye(2), QMatrix.zeros(2, 2), Quaternion(1, 2, 3, 4)), QMatrix.eye(2)) == 0.0
    a = 0.6
    series, term = Quaternion(), Quaternion(1.0)
    for _ in range(200):
        series, term = series + term, term * I * a
    assert qclose(resolvent_star(QMatrix.eye(1), QMatrix.real([[a]]), I).item(), series, 1e-14)


def test_affine_resolvent_examples(rng):
    T = QMatrix.random(rng, 3, 3)
    C = QMatrix.random(rng, 2, 3)
    assert qdiff(affine_resolvent_star(C, T, 1.3), C @ qmat_inverse(QMatrix.eye(3) * 1.3 - T)) <= 1e-12
    p = Quaternion(0.4, -0.3, 1.1, 0.2)
    assert qdiff(affine_resolvent_star(QMatrix.eye(3), T, p), right_s_resolvent(T, p)) <= 1e-12
    v = affine_resolvent_star(QMatrix.eye(1), QMatrix.scalar(I), 1.0).item()
    assert qclose(v, Quaternion(0.5, 0.5, 0, 0), 1e-15)


def test_schur_eval_examples(rng):
    r = random_schur_realization(rng, 3, 2, x0=1.4)
    assert qdiff(schur_eval(r, 1.4), r.H) == 0.0
    r1 = blaschke_realization(1.0)
    assert qclose(schur_eval(r1, 2.0).item(), 1 / 3, 1e-15)
    ra = blaschke_realization(Quaternion(1, 1, 0, 0))
    b = BlaschkeFactor(Quaternion(1, 1, 0, 0))
    assert max(abs(schur_eval(ra, p).item() - b(p)) for p in pts(rng, 1000)) <= 1e-10


def test_schur_real_axis_anchor(rng):
    r = random_schur_realization(rng, 3, 2)
    for x in rng.uniform(0.1, 4.0, 20):
        assert qdiff(schur_eval(r, x), schur_real_axis(r, x)) <= 1e-14


def test_literal_variant_only_agrees_at_center(rng):
    r = random_schur_realization(rng, 2, 1, x0=1.0)
    assert qdiff(schur_eval(r, 1.0, literal=True), schur_eval(r, 1.0)) <= 1e-15
    assert qdiff(schur_eval(r, 2.5, literal=True), schur_eval(r, 2.5)) > 1e-6


def test_coisometry_examples(rng):
    r1 = blaschke_realization(1.0)
    assert qdiff(r1.operator_matrix, QMatrix.real([[0.0, 1.0], [-1.0, 0.0]])) == 0.0
    assert coisometry_residual(r1) == 0.0
    assert coisometry_residual(blaschke_realization(Quaternion(1, 1, 0, 0))) <= 1e-12
    M = QMatrix.random(rng, 3, 3)
    bad = SchurRealization(1.0, M[:2, :2], M[:2, 2:], M[2:, :2], M[2:, 2:])
    assert coisometry_residual(bad) > 0.1
    with pytest.raises(DomainError):
        blaschke_realization(Quaternion(0, 1, 0, 0))


def test_step9_kernel_identity(rng):
    r = random_schur_realization(rng, 3, 2)
    xs = rng.uniform(0.2, 3.0, 20)
    worst = 0.0
    for x in xs:
        Sx = schur_real_axis(r, x)
        for y in xs:
            lhs = (r.J2 - Sx @ r.J1 @ schur_real_axis(r, y).H) * (1 / (x + y))
            worst = max(worst, qdiff(lhs, schur_kernel_closed(r, x, y)))
    assert worst <= 1e-10


def test_step9_indefinite_metric(rng):
    P = signature_matrix(2, 1)
    r = random_schur_realization(rng, 3, 2, state_metric=P, J=signature_matrix(1, 1))
    assert coisometry_residual(r) <= 1e-10
    for x, y in [(0.5, 1.5), (2.0, 0.3)]:
        lhs = (r.J2 - schur_real_axis(r, x) @ r.J1 @ schur_real_axis(r, y).H) * (1 / (x + y))
        assert qdiff(lhs, schur_kernel_closed(r, x, y)) <= 1e-9


def test_cof_examples(rng):
    d = COFData(QMatrix.real([[-0.5]]), QMatrix.eye(1), QMatrix.eye(1))
    assert qdiff(cof_eval(d, 0.0), QMatrix.eye(1)) == 0.0
    for x in (0.3, 1.0, 4.0):
        assert abs(cof_eval(d, x).item().w - (2 - x) / (2 + x)) <= 1e-15
        assert cof_identity_residual(d, x, 1.7) <= 1e-12
    assert all(s.w < 0 for s in s_spectrum(d.A))
    with pytest.raises(DomainError):
        COFData(QMatrix.real([[1.0]]), QMatrix.eye(1), QMatrix.eye(1))


def test_cof_identity_quaternionic(rng):
    worst = 0.0
    for _ in range(20):
        d = random_cof(rng, int(rng.integers(1, 4)), int(rng.integers(1, 3)))
        for p, q in zip(pts(rng, 50), pts(rng, 50)):
            worst = max(worst, cof_identity_residual(d, p, q))
    assert worst <= 1e-12


def test_cof_kernel_psd_on_reals(rng):
    d = random_cof(rng, 3, 2, 1)
    x = [Quaternion(v) for v in np.linspace(0.2, 3, 8)]
    blocks = QMatrix.block([[cof_kernel(d, a, b) for b in x] for a in x])
    assert signature((blocks + blocks.H) * 0.5, 1e-10).nu_minus == 0


def test_gp_example_star_inverse(rng):
    d = example_gp_star_inverse(I)
    assert qclose(gp_backward_shift_eval(d, 1.0).item(), Quaternion(0.5, -0.5, 0, 0), 1e-15)
    assert qdiff(gp_backward_shift_eval(d, 0.0), d.D) == 0.0
    assert gp_real_part(d).max_abs() == 0.0
    for p in pts(rng, 1000):
        expect = (p * p + 1.0).inverse() * (p - I)
        assert qclose(gp_backward_shift_eval(d, p).item(), expect, 1e-12)


def test_gp_positive_kernels_psd(rng):
    for _ in range(5):
        d = random_positive_gp(rng, 3, 2)
        assert signature(gp_real_part(d), 1e-12).nu_plus == 0
        spec = KernelSpec.gp(gp_function(d))
        g = GramSpec(tuple(pts(rng, 8)), tuple(QMatrix.random(rng, 2, 1) for _ in range(8)))
        assert gram_eigenvalues(gram_matrix(spec, g)).min() >= -1e-8


def test_gp_realization_examples(rng):
    T = QMatrix.eye(2) * -1.0
    r = GPRealization(1.0, (T - QMatrix.eye(2)) * 0.5, QMatrix.random(rng, 2, 1), QMatrix.random(rng, 1, 2), QMatrix.eye(1))
    gp_realization_eval(r)(Quaternion(0.5, 0.5, 0, 0))
    toy = GPRealization(1.0, QMatrix.zeros(1, 1), QMatrix.eye(1), QMatrix.eye(1), QMatrix.eye(1))
    ev = gp_realization_eval(toy)
    for x in (0.2, 1.0, 3.0):
        assert abs(ev(x).item().w - 2 / (x + 1)) <= 1e-15
    spec = KernelSpec.gp(SliceFunction(ev))
    G = gram_matrix(spec, GramSpec(tuple(Quaternion(x) for x in np.linspace(0.2, 3, 10))))
    assert gram_eigenvalues(G).min() >= -1e-12
    with pytest.raises(DomainError):
        GPRealization(1.0, QMatrix.eye(1), QMatrix.eye(1), QMatrix.eye(1), QMatrix.eye(1))


def test_r1r1(rng):
    for x0 in (0.5, 1.0, 2.5):
        assert r1r1_residual(random_unitary(rng, 4), x0) <= 1e-12
    assert r1r1_residual(QMatrix.eye(2) * 2.0, 1.0) > 0.1


def test_pair_model_example():
    m = PairModel(QMatrix.scalar(I), QMatrix.scalar(-I), QMatrix.real([[math.sqrt(2)]]), QMatrix.scalar(-I))
    assert qclose(pair_phi_eval(m, 1.0).item(), 1.0, 1e-15)
    assert qclose(pair_phi_inverse_eval(m, 1.0).item(), 1.0, 1e-15)


def test_pair_models_random(rng):
    for _ in range(20):
        m = random_pair_model(rng, int(rng.integers(1, 6)), int(rng.integers(1, 4)))
        xs = rng.uniform(0.2, 3.0, 20)
        for x in xs:
            Px = pair_phi_eval(m, x)
            assert qdiff(Px @ pair_phi_inverse_eval(m, x), QMatrix.eye(Px.rows)) <= 1e-10
            H = (Px + Px.H) * 0.5
            assert signature(H, 1e-10).nu_minus == 0
        assert pair_kernel_residual(m, xs[0], xs[1]) <= 1e-11


def test_pair_model_validation():
    with pytest.raises(DomainError):
        PairModel(QMatrix.eye(1), QMatrix.eye(1), QMatrix.eye(1), QMatrix.scalar(I))
    with pytest.raises(DomainError):
        PairModel(QMatrix.scalar(I), QMatrix.scalar(I), QMatrix.eye(1), QMatrix.eye(1))


def scalar_gp(a, b, c, d):
    return GPBackwardShift(*(QMatrix.scalar(v) for v in (a, b, c, d)))


def test_realization_inverse(rng):
    const = scalar_gp(0.0, 0.0, 0.0, Quaternion(2, 1, 0, 0))
    assert qclose(realization_inverse(const).D.item(), Quaternion(2, 1, 0, 0).inverse(), 1e-15)
    for d in (example_gp_star_inverse(I), random_positive_gp(rng, 3, 2)):
        inv = realization_inverse(d)
        back = realization_inverse(inv)
        for x in rng.uniform(0.1, 3.0, 20):
            m = d.D.rows
            assert qdiff(inv(x) @ d(x), QMatrix.eye(m)) <= 1e-10
            assert qdiff(back(x), d(x)) <= 1e-10
    with pytest.raises(SingularBlock):
        realization_inverse(scalar_gp(1.0, 1.0, 1.0, 0.0))


def test_realization_product(rng):
    d1 = scalar_gp(Quaternion(0.2, 0.1, 0, 0), 1.0, 0.5, 1.0)
    d2 = scalar_gp(Quaternion(-0.3, 0, 0.4, 0), 0.7, 1.0, 2.0)
    prod = realization_product(d1, d2)
    assert prod.A.shape == (2, 2)
    for x in rng.uniform(0.1, 2.0, 10):
        assert qdiff(prod(x), d1(x) @ d2(x)) <= 1e-12
        assert qdiff(realization_product(d1, identity_gp(1))(x), d1(x)) <= 1e-14
        assert qdiff(realization_product(prod, realization_inverse(d2))(x), d1(x)) <= 1e-10
    with pytest.raises(DomainError):
        realization_product(d1, identity_gp(2))


def test_json_round_trips(rng):
    r = random_schur_realization(rng, 2, 1)
    r2 = SchurRealization.from_json(r.to_json())
    assert qdiff(r2.operator_matrix, r.operator_matrix) == 0.0
    d = random_cof(rng, 2, 2, 1)
    assert qdiff(COFData.from_json(d.to_json()).A, d.A) == 0.0
    with pytest.raises(DomainError):
        SchurRealization.from_json({"B": [[1]]})
