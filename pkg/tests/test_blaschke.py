import numpy as np
import pytest

from helpers import I, qclose
from qslice.blaschke import (
    BlaschkeFactor,
    SphereFactor,
    ZeroSet,
    blaschke_eval,
    boundary_modulus_check,
    convergence_diagnostic,
    partial_product_gap,
    prescribe_zeros,
    product_eval,
    slice_taylor_coefficient,
    sphere_factor_eval,
    vanishing_derivative,
)
from qslice.errors import ConstructionFailure, DomainError, SingularPoint
from qslice.quat import Quaternion, random_halfspace_points, random_unit_imaginary, twist
from qslice.slicefn import PowerSeries, ps_eval, ps_star_inverse, ps_star_mul

ONE_I = Quaternion(1, 1, 0, 0)
ONE_J = Quaternion(1, 0, 1, 0)


def factor_series(a, order=160):
    """b_a about 0 as (p^2 + 2 Re(a) p + |a|^2)^{-*} * (p^2 - a^2); radius |a|."""
    a = Quaternion.of(a)
    den = PowerSeries.scalar([a.norm2(), 2 * a.w, 1.0])
    num = PowerSeries.scalar([-(a * a), 0.0, 1.0])
    return ps_star_mul(ps_star_inverse(den, order), num, cap=order + 3)


def test_factor_examples():
    assert blaschke_eval(BlaschkeFactor(1.0), 1.0) == Quaternion()
    assert abs(BlaschkeFactor(ONE_I)(ONE_I)) <= 1e-15
    assert qclose(BlaschkeFactor(1.0)(I), I, 1e-15)


def test_real_factor_matches_quotient(rng):
    f = BlaschkeFactor(1.7)
    for p in random_halfspace_points(rng, 200):
        p = Quaternion(*p)
        assert qclose(f(p), (p + 1.7).inverse() * (p - 1.7), 1e-13)


def test_factor_validation_and_pole():
    with pytest.raises(DomainError):
        BlaschkeFactor(Quaternion(0, 1, 0, 0))
    with pytest.raises(DomainError):
        SphereFactor(-1.0)
    with pytest.raises(SingularPoint):
        BlaschkeFactor(ONE_I)(Quaternion(-1, 0, 0, 1))


def test_sphere_factor_examples(rng):
    s = SphereFactor(ONE_I)
    assert abs(sphere_factor_eval(s, ONE_I)) <= 1e-15
    assert abs(s(Quaternion(1, -1, 0, 0))) <= 1e-15
    for _ in range(10):
        on = Quaternion(1.0) + random_unit_imaginary(rng) * 1.0
        assert abs(s(on)) <= 1e-13
    a = Quaternion(0.8, 0.3, -0.5, 0.2)
    for p in random_halfspace_points(rng, 50):
        p = Quaternion(*p)
        swapped = SphereFactor(twist(a, Quaternion(*rng.normal(size=4))))
        assert qclose(SphereFactor(a)(p), swapped(p), 1e-13)
    for x in np.linspace(0.1, 5, 9):
        v = s(x)
        assert v.imag_norm() <= 1e-15 and abs(v) < 1


def test_product_examples(rng):
    for x in np.linspace(0.2, 4, 7):
        assert abs(product_eval([BlaschkeFactor(1.0)] * 2, x).w - ((x - 1) / (x + 1)) ** 2) <= 1e-15
    fold = product_eval([BlaschkeFactor(ONE_I), BlaschkeFactor(ONE_J)], 1.0)
    series = ps_star_mul(factor_series(ONE_I), factor_series(ONE_J), cap=200)
    assert qclose(fold, ps_eval(series, 1.0).item(), 1e-10)
    for p in random_halfspace_points(rng, 1000):
        p = Quaternion(*p)
        pair = product_eval([BlaschkeFactor(ONE_I), BlaschkeFactor(ONE_I.conj())], p)
        assert qclose(SphereFactor(ONE_I)(p), pair, 1e-12)


def test_product_matches_series_oracle(rng):
    a, b = Quaternion(2.0, 0.5, -0.4, 0.3), Quaternion(1.8, 0.0, 0.7, -0.6)
    series = ps_star_mul(factor_series(a), factor_series(b), cap=200)
    for _ in range(50):
        d = rng.normal(size=4)
        p = Quaternion(*(d / np.linalg.norm(d) * rng.uniform(0, 1.2)))
        fold = product_eval([BlaschkeFactor(a), BlaschkeFactor(b)], p)
        assert qclose(fold, ps_eval(series, p).item(), 1e-9)


def test_prescribe_single_point_and_sphere(rng):
    out = prescribe_zeros(ZeroSet(((ONE_I, 1),)))
    assert out == [BlaschkeFactor(ONE_I)]
    out = prescribe_zeros(ZeroSet((), ((ONE_I, 1),)))
    assert out == [SphereFactor(ONE_I)]
    for _ in range(10):
        on = Quaternion(1.0) + random_unit_imaginary(rng)
        assert abs(product_eval(out, on)) <= 1e-9


def test_prescribe_double_point():
    out = prescribe_zeros(ZeroSet(((ONE_I, 2),)))
    assert len(out) == 2
    assert abs(product_eval(out, ONE_I)) <= 1e-9
    assert vanishing_derivative(out, ONE_I) <= 1e-6
    assert abs(slice_taylor_coefficient(out, ONE_I, 1)) <= 1e-9
    assert abs(slice_taylor_coefficient(out, ONE_I, 2)) > 1e-3


def test_prescribed_zeros_vanish_only_there(rng):
    a1, a2, c = Quaternion(1.0, 0.5, 0.2, 0.0), Quaternion(0.6, 0.0, -0.3, 0.8), Quaternion(2.0, 1.0, 0.0, 0.0)
    factors = prescribe_zeros(ZeroSet(((a1, 2), (a2, 1)), ((c, 1),)))
    assert len(factors) == 4 and isinstance(factors[0], SphereFactor)
    for z in (a1, a2, Quaternion(2.0) + random_unit_imaginary(rng)):
        assert abs(product_eval(factors, z)) <= 1e-9
    sphere_dist = lambda p, q: np.hypot(p.w - q.w, p.imag_norm() - q.imag_norm())
    control = [Quaternion(*p) for p in random_halfspace_points(rng, 400)]
    control = [p for p in control if min(sphere_dist(p, z) for z in (a1, a2, c)) > 0.2][:50]
    assert len(control) == 50
    assert min(abs(product_eval(factors, p)) for p in control) > 1e-4


def test_zero_set_validation():
    with pytest.raises(DomainError):
        ZeroSet(((Quaternion(-1.0), 1),))
    with pytest.raises(DomainError):
        ZeroSet(((ONE_I, 0),))
    with pytest.raises(DomainError):
        ZeroSet(((ONE_I, 1), (ONE_J, 1)))
    zs = ZeroSet.from_json({"points": [{"a": [1, 1, 0, 0], "mu": 2}], "spheres": [{"c": [2, 0, 1, 0]}]})
    assert zs.points[0] == (ONE_I, 2) and zs.spheres[0][1] == 1


def test_prescribe_fails_when_prefix_already_vanishes():
    # a point zero on a sphere factor's sphere: the alignment value is already 0
    with pytest.raises(ConstructionFailure):
        prescribe_zeros(ZeroSet(((ONE_J, 1),), ((ONE_I, 1),)))


def test_convergence_examples():
    geo = [Quaternion(2.0**-j, 2.0**-j, 0, 0) for j in range(1, 40)]
    d = convergence_diagnostic(geo)
    assert abs(d.sum_re - 1.0) <= 1e-11 and d.verdict
    harmonic = [Quaternion(1 / j, 1 / j, 0, 0) for j in range(1, 40)]
    assert not convergence_diagnostic(harmonic).verdict
    gaps = [partial_product_gap(geo[:n], (Quaternion(1.0),)) for n in (10, 20, 30)]
    # the gap against the half-length prefix tracks the tail sum 2^{-n/2}
    assert gaps[0] > gaps[1] > gaps[2]
    for n, g in zip((10, 20, 30), gaps):
        assert g <= 4 * 2.0 ** (-n // 2)
    with pytest.raises(DomainError):
        convergence_diagnostic([Quaternion(-1.0)])


def test_boundary_modulus():
    assert boundary_modulus_check(BlaschkeFactor(1.0), 100, 3) <= 1e-15
    assert boundary_modulus_check(BlaschkeFactor(ONE_I), 1000, 3) <= 1e-12
    a = ONE_I
    assert abs(abs(a.conj().inverse() * (-a)) - 1) <= 1e-15
