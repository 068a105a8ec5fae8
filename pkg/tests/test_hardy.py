import math

import numpy as np
import pytest

from helpers import I, J, qclose
from qslice.errors import DomainError, EvaluationError
from qslice.hardy import (
    DEFAULT_QUADRATURE,
    HardyFunction,
    ONB_QUADRATURE,
    QuadratureSpec,
    blaschke_isometry_check,
    blaschke_star,
    conjugate_norm_check,
    hardy_inner,
    hardy_inner_report,
    kernel_column,
    norm_equivalence_check,
    onb_eval,
    onb_function,
    onb_gram,
    onb_kernel_partial,
    reproducing_residual,
    slice_norm,
    star_conjugate,
    star_inverse_linear,
)
from qslice.kernels import k_eval
from qslice.quat import Quaternion, random_unit_imaginary

F1 = star_inverse_linear(1.0)


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(cutoff=-1)
    with pytest.raises(DomainError):
        QuadratureSpec(nodes=101)
    with pytest.raises(DomainError):
        QuadratureSpec(scheme="trapezoid")
    y, w = QuadratureSpec(cutoff=2.0, nodes=4).rule()
    assert np.allclose(y, [-2, -1, 0, 1, 2]) and abs(w.sum() - 4.0) <= 1e-15


def test_norm_of_first_function():
    rep = hardy_inner_report(F1, F1)
    assert abs(rep.value.w - math.pi) <= 2 / DEFAULT_QUADRATURE.cutoff
    assert abs(rep.value.w - math.pi) <= 1e-9
    assert rep.tail > 0


def test_inner_product_axioms(rng):
    f = star_inverse_linear(Quaternion(1.0, 0.7, -0.2, 0.4))
    g = onb_function(2).right_mul(Quaternion(0, 0, 1, 1)) + F1
    a, b = Quaternion(0.3, -1, 2, 0.5), Quaternion(-0.4, 0.2, 0.1, 1)
    fg = hardy_inner(f, g)
    assert qclose(fg, hardy_inner(g, f).conj(), 1e-10)
    assert qclose(hardy_inner(f.right_mul(a), g), fg * a, 1e-10)
    assert qclose(hardy_inner(f, g.right_mul(b)), b.conj() * fg, 1e-10)
    assert abs(hardy_inner(onb_function(0), onb_function(1))) <= 1e-6


def test_inner_product_rejects_non_finite():
    bad = HardyFunction(lambda P: np.full(P.shape, np.nan))
    with pytest.raises(EvaluationError):
        hardy_inner(bad, F1)
    with pytest.raises(DomainError):
        HardyFunction(lambda P: P, decay=0.5)


def test_reproducing_examples(rng):
    assert reproducing_residual(F1, 1.0) <= 1e-4
    q0 = Quaternion(0.7, 0.0, 0.8, 0.0)
    p = Quaternion(1.2, 0.0, -0.3, 0.0)
    assert reproducing_residual(kernel_column(q0), p) <= 1e-4
    for p in [Quaternion(0.5, 0.3, -0.2, 0.9), Quaternion(2.0, 0, 0, 1.5)]:
        for f in (F1, star_inverse_linear(Quaternion(0.8, 0.3, 0.5, 0.0)), onb_function(3)):
            assert reproducing_residual(f, p) <= 1e-4


def test_reproducing_real_point_slice_independent(rng):
    f = star_inverse_linear(Quaternion(0.8, 0.3, 0.5, 0.0))
    base = reproducing_residual(f, 1.3, I=I)
    for _ in range(4):
        assert abs(reproducing_residual(f, 1.3, I=random_unit_imaginary(rng)) - base) <= 2e-4


def test_quadrature_refinement():
    coarse = QuadratureSpec(cutoff=50.0, nodes=200)
    fine = QuadratureSpec(cutoff=50.0, nodes=400)
    f = star_inverse_linear(Quaternion(0.8, 0.3, 0.5, 0.0))
    r0 = reproducing_residual(f, 0.9, coarse)
    r1 = reproducing_residual(f, 0.9, fine)
    assert r1 * 3 <= r0
    n0 = abs(slice_norm(F1, q=coarse) ** 2 - math.pi)
    n1 = abs(slice_norm(F1, q=fine) ** 2 - math.pi)
    assert n1 * 3 <= n0


def test_onb_examples():
    assert qclose(onb_eval(0, 1.0), 0.5 / math.sqrt(math.pi), 1e-16)
    G = onb_gram(7)
    assert G.shape == (8, 8, 4)
    dev = G.copy()
    dev[np.arange(8), np.arange(8), 0] -= 1.0
    assert np.abs(dev).max() <= 1e-6


def test_onb_partial_sums_approach_kernel():
    p, q0 = Quaternion(0.8, 0.6, 0, 0), Quaternion(1.5, -0.2, 0, 0)
    target = k_eval(p, q0) * (1 / (2 * math.pi))
    errs = [abs(onb_kernel_partial(N, p, q0) - target) for N in (2, 5, 10, 20)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] <= 1e-15


def test_norm_equivalence_examples(rng):
    for _ in range(3):
        r = norm_equivalence_check(F1, random_unit_imaginary(rng), random_unit_imaginary(rng))
        assert abs(r - 1) <= 1e-6
    c = Quaternion(1, 0, 0.5, 0)
    r = norm_equivalence_check(F1.right_mul(c), I, random_unit_imaginary(rng))
    assert abs(r - 1) <= 1e-6
    f = F1 + star_inverse_linear(2.0).right_mul(J)
    for _ in range(20):
        r = norm_equivalence_check(f, random_unit_imaginary(rng), random_unit_imaginary(rng), ONB_QUADRATURE)
        assert 0.5 <= r <= 2.0


def test_star_conjugate_values():
    c = Quaternion(1, 1, 0, 0)
    fc = star_conjugate(star_inverse_linear(c))
    other = star_inverse_linear(c.conj())
    for p in [Quaternion(0.4, 0.2, -0.7, 0.1), Quaternion(2, 0, 0, 3), Quaternion(1.0)]:
        assert qclose(fc(p), other(p), 1e-13)
    assert qclose(star_conjugate(F1)(Quaternion(0.3, 0, 1, 1)), F1(Quaternion(0.3, 0, 1, 1)), 1e-15)


def test_conjugate_norm_examples():
    assert conjugate_norm_check(F1) <= 1e-15
    assert conjugate_norm_check(F1.right_mul(Quaternion(1, -1, 0, 0))) <= 1e-6
    assert conjugate_norm_check(star_inverse_linear(Quaternion(1, 1, 0, 0))) <= 1e-5


def test_boundary_norm_is_supremum():
    vals = [slice_norm(F1, I, x=x) ** 2 for x in (0.0, 0.1, 0.5, 1.0, 2.0)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert abs(slice_norm(F1, I, x=1e-7) ** 2 - vals[0]) <= 1e-5


def test_blaschke_isometry_examples():
    assert blaschke_isometry_check(1.5, F1) <= 1e-8
    assert blaschke_isometry_check(Quaternion(1, 1, 0, 0), star_inverse_linear(2.0)) <= 1e-5
    assert blaschke_isometry_check(Quaternion(1, 1, 0, 0), kernel_column(Quaternion(1, 0, 1, 0))) <= 1e-4
    with pytest.raises(DomainError):
        blaschke_star(Quaternion(0, 1, 0, 0), F1)
