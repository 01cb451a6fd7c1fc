from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bispectra.family import FamilyConfig
from bispectra.grassmann import (
    DegenerateBasis,
    DepthExceeded,
    FormalLaurentVector,
    GrassmannPlane,
    family_tau,
    flag_check,
    normalize_plane,
    plane_from_family,
    plane_from_vectors,
    plucker_coordinate,
    plucker_relations_check,
    reduce_in_plane,
    reduction_check,
    tau_series,
    trivial_plane,
)
from bispectra.schur import schur
from bispectra.second_kind import saddle_tail
from bispectra.series import TauSeries

GH2 = FamilyConfig.gould_hopper(2)
GH3 = FamilyConfig.gould_hopper(3)


def kp_residual(tau: TauSeries) -> TauSeries:
    """``F_1111 + 6 F_11**2 + 3 F_22 - 4 F_13`` with ``F = log tau``, reliable to weight D - 4."""
    F = tau.log()
    F11 = F.derivative(1).derivative(1)
    res = F11.derivative(1).derivative(1) + F11 * F11 * 6 + F.derivative(2).derivative(2) * 3
    res = res - F.derivative(1).derivative(3) * 4
    return res.truncate(tau.D - 4)


def test_vector_floor_and_shift():
    v = FormalLaurentVector(2, {2: 1, 0: 3, -5: 7}, -3)
    assert v[0] == 3 and v[1] == 0
    assert -5 not in v.coeffs
    with pytest.raises(DepthExceeded):
        v[-4]
    w = v.shift(2)
    assert w.leading_exponent == 4 and w[2] == 3 and w.floor == -1
    with pytest.raises(ValueError):
        FormalLaurentVector(0, {1: 1}, -3)


def test_family_plane_vectors_are_stripped_tails():
    plane = plane_from_family(GH2, -1, 9)
    assert [v.leading_exponent for v in plane.basis[:4]] == [0, 1, 2, 3]
    airy = saddle_tail(2, -1, 3)
    assert plane.basis[0].coeffs == {e: c for e, c in airy.items() if e >= -9}
    assert plane.basis[0][-3] == Fraction(5, 48)


def test_charge_zero_plane_adds_nu_zero():
    low = plane_from_family(GH2, -1, 9)
    high = plane_from_family(GH2, 0, 9)
    assert high.basis[0].leading_exponent == -1
    assert high.basis[1].coeffs == low.basis[0].coeffs
    assert flag_check(low, high).passed
    assert not flag_check(high, low).passed


def test_plane_validation():
    with pytest.raises(DegenerateBasis):
        GrassmannPlane(-1, (FormalLaurentVector(1, {1: 1}, -3),), 4)
    with pytest.raises(ValueError):
        plane_from_family(FamilyConfig.gould_hopper(1), -1, 4)
    with pytest.raises(DepthExceeded):
        plane_from_family(GH2, -1, -1)
    with pytest.raises(DepthExceeded):
        tau_series(trivial_plane(-1, 3), 5)
    with pytest.raises(DepthExceeded):
        plucker_coordinate(trivial_plane(-1, 3), (2, 2))


def test_normalize_examples():
    a = Fraction(2, 5)
    p = trivial_plane(-1, 4)
    assert normalize_plane(p).basis == p.basis
    mixed = plane_from_vectors(-1, [{0: 1}, {1: 1, 0: a}], 4)
    norm = normalize_plane(mixed)
    assert norm.basis[1].coeffs == {1: 1}
    assert norm.normalized


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=6, max_size=6))
@settings(max_examples=30, deadline=None)
def test_normalization_keeps_the_span(cs):
    vectors = [{0: 2, -1: cs[0], -2: cs[1]}, {1: 3, 0: cs[2], -1: cs[3]}, {2: 1, 1: cs[4], 0: cs[5]}]
    p = plane_from_vectors(-1, vectors, 6)
    norm = normalize_plane(p)
    for v in p.basis:
        rest = reduce_in_plane(norm, v)
        assert not any(c for e, c in rest.coeffs.items() if e >= rest.floor)


def test_plucker_examples():
    a = Fraction(-3, 4)
    assert plucker_coordinate(trivial_plane(-1, 4), (1,)) == 0
    assert plucker_coordinate(trivial_plane(-1, 4), ()) == 1
    p = plane_from_vectors(-1, [{0: 1, -1: a}], 4)
    assert plucker_coordinate(p, (1,)) == a
    assert plucker_coordinate(p, (2,)) == 0


def test_tau_examples():
    assert tau_series(trivial_plane(-1, 6), 6) == TauSeries.one(6, 6)
    assert tau_series(trivial_plane(3, 6), 6) == TauSeries.one(6, 6)
    a = Fraction(5, 3)
    tau = tau_series(plane_from_vectors(-1, [{0: 1, -1: a}], 4), 4)
    assert tau == TauSeries.one(4, 4) + TauSeries.variable(1, 4, 4, a)


def test_family_tau_low_orders():
    tau = family_tau(2, -1, 6)
    F = tau.log()
    assert F.homogeneous(3).terms == {(3, 0, 0, 0, 0, 0): Fraction(1, 12), (0, 0, 1, 0, 0, 0): Fraction(1, 16)}
    assert F.homogeneous(1).is_zero() and F.homogeneous(2).is_zero()


@pytest.mark.parametrize("m", [-1, 0])
def test_family_plucker_relations(m):
    plane = normalize_plane(plane_from_family(GH2, m, 10))
    report = plucker_relations_check(plane, 8)
    assert report.passed and report.checked > 0


def test_corrupted_coordinate_is_detected():
    p = normalize_plane(plane_from_vectors(-1, [{0: 1, -1: 2, -2: Fraction(1, 3)}, {1: 1, -1: -1, -2: 5}], 6))
    pi = {lam: plucker_coordinate(p, lam) for lam in [(), (1,), (2,), (1, 1), (2, 1), (2, 2)]}
    terms = [pi[(2, 2)] * pi[()], -pi[(2, 1)] * pi[(1,)], pi[(2,)] * pi[(1, 1)]]
    assert any(terms) and sum(terms) == 0
    tau = tau_series(p, 6)
    assert kp_residual(tau).is_zero()
    corrupted = tau + schur((2, 2), 6, 6) * Fraction(1, 3)
    assert not kp_residual(corrupted).is_zero()


def test_reduced_times_absent():
    # y^d W in W removes the times t_(dk)
    tau = family_tau(2, -1, 10)
    assert [k for k in range(1, 11) if tau.depends_on(k)] == [1, 3, 5, 7, 9]
    tau3 = family_tau(3, -1, 8)
    assert [k for k in range(1, 9) if tau3.depends_on(k)] == [1, 2, 4, 5, 7]


@pytest.mark.parametrize("d,m", [(2, -1), (2, 0), (3, -1), (3, 0), (2, 1)])
def test_family_tau_solves_kp(d, m):
    assert kp_residual(family_tau(d, m, 9)).is_zero()


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=5, max_size=5))
@settings(max_examples=20, deadline=None)
def test_random_planes_satisfy_kp_and_plucker(cs):
    vectors = [{0: 1, -1: cs[0], -2: cs[1], -4: cs[2]}, {1: 1, -1: cs[3], -3: cs[4]}]
    p = plane_from_vectors(-1, vectors, 8)
    assert plucker_relations_check(normalize_plane(p), 6).passed
    assert kp_residual(tau_series(p, 8)).is_zero()


def test_reduction_examples():
    assert reduction_check(plane_from_family(GH2, -1, 12), 2).passed
    assert reduction_check(plane_from_family(GH3, -1, 12), 3).passed
    assert reduction_check(trivial_plane(-1, 8), 2).passed


def test_charge_zero_reduction_leaves_nu_one():
    # y^2 nu(0) = 1 * nu(1) + nu(-2) and nu(1) leads below W_0
    report = reduction_check(plane_from_family(GH2, 0, 12), 2)
    assert not report.passed
    residual = report.failures[0]["residual"]
    nu1 = {e - 2: c for e, c in saddle_tail(2, 1, 4).items()}
    assert residual == {e: c for e, c in nu1.items() if e >= min(residual)}
