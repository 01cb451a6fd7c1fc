from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bispectra.family import FamilyConfig
from bispectra.grassmann import family_tau
from bispectra.intersections import correlator, free_energy_coefficient
from bispectra.schur import partitions
from bispectra.series import TauSeries
from bispectra.virasoro import (
    LOG_LITERAL,
    LOG_RESOLVED,
    BosonicOperator,
    CapTooSmall,
    apply_operator,
    build_virasoro,
    check_commutation,
    check_constraints,
    commutator,
    kdv_free_energy,
)

K, D = 8, 8


def t(*items):
    return TauSeries.from_exponents(K, D, items)


def test_current_on_vacuum():
    one = TauSeries.one(K, D)
    for k in (1, 2, 5):
        assert apply_operator(BosonicOperator.current(-k), one) == t(({k: 1}, k))
        assert apply_operator(BosonicOperator.current(k), one).is_zero()
    assert apply_operator(BosonicOperator.current(0, 3), one) == one * 3


def test_heisenberg_relations():
    J = BosonicOperator.current
    for a in range(-3, 4):
        for b in range(-3, 4):
            c = commutator(J(a), J(b))
            assert c == BosonicOperator.scalar(a if a + b == 0 else 0)


def test_literal_examples():
    fam = build_virasoro(2, -1, 8, convention="literal")
    assert apply_operator(fam.mode(0), t(({1: 1, 3: 1}, 1))) == t(({3: 2}, Fraction(1, 2)), ({1: 1, 5: 1}, Fraction(3, 2)))
    assert apply_operator(fam.mode(-1), TauSeries.one(K, D)) == t(({1: 2}, Fraction(1, 4)))
    assert apply_operator(fam.mode(0), TauSeries.one(K, D)).is_zero()
    assert apply_operator(fam.mode(1), t(({3: 1}, 1))) == t(({1: 1}, Fraction(1, 2)))
    assert apply_operator(fam.mode(2), t(({1: 1, 3: 1}, 1))) == TauSeries.one(K, D) * Fraction(1, 2)
    assert fam.convention_log == LOG_LITERAL


def test_resolved_examples():
    fam = build_virasoro(2, -1, 8)
    assert apply_operator(fam.mode(-1), TauSeries.one(K, D)) == t(({1: 2}, Fraction(1, 4)))
    # twisted-vacuum constant of L_0 at d = 2
    assert fam.mode(0).constant == Fraction(1, 16)
    assert apply_operator(fam.mode(1), t(({3: 1}, 1))) == t(({1: 1}, Fraction(1, 2)))
    assert fam.convention_log == LOG_RESOLVED
    assert fam.mode(-1).quadratic_creation == {(1, 1): Fraction(1, 4)}
    assert fam.mode(1).quadratic_annihilation == {(1, 1): Fraction(1, 4)}
    assert fam.mode(0).mixed[(1, 1)] == Fraction(1, 2)


def test_views_cover_every_term():
    for k in (-1, 0, 1, 2, 3):
        L = build_virasoro(3, 0, 12).mode(k)
        assert L.max_order() <= 2
        n_terms = sum(
            len(v) for v in (L.quadratic_creation, L.mixed, L.quadratic_annihilation, L.linear, L.linear_creation)
        ) + bool(L.constant)
        assert n_terms == len(L.terms)


def test_cap_and_convention_validation():
    with pytest.raises(CapTooSmall):
        build_virasoro(3, -1, 8)
    with pytest.raises(ValueError):
        build_virasoro(2, -1, 8, convention="other")
    with pytest.raises(CapTooSmall):
        apply_operator(build_virasoro(2, -1, 12).mode(-1), TauSeries.one(4, 4))
    with pytest.raises(ValueError):
        build_virasoro(2, -1, 8).mode(-2)
    fam = build_virasoro(FamilyConfig.gould_hopper(2), 0, 6)
    assert fam.d == 2 and fam.charge == 1


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("m", [-1, 0, 2])
def test_commutators_close(d, m):
    report = check_commutation(build_virasoro(d, m, 3 * d + 6), k_max=2, D=6)
    assert report.passed, report.failures[:3]
    central = report.details["central"]
    assert central["[L-1,L2]"] == 0
    assert central["[L0,L1]"] == 0


def test_literal_convention_does_not_close():
    assert not check_commutation(build_virasoro(2, -1, 12, convention="literal"), k_max=1, D=4).passed


def test_higher_modes_from_commutators():
    fam = build_virasoro(2, -1, 14)
    report = check_commutation(fam, k_max=3, D=4)
    assert report.passed
    assert commutator(fam.mode(0), fam.mode(0)).is_zero()


@pytest.mark.parametrize("m", [-2, -1, 0])
def test_constraints_hold(m):
    tau = family_tau(2, m, 11)
    report = check_constraints(tau, build_virasoro(2, m, tau.K), k_max=2)
    assert report.passed, report.failures[:3]


def test_constraints_hold_for_d3():
    tau = family_tau(3, -1, 11)
    report = check_constraints(tau, build_virasoro(3, -1, tau.K), k_max=2)
    assert report.passed, report.failures[:3]


@pytest.mark.parametrize("m", [-2, -1, 0, 1, 2])
def test_l0_eigenvalue_across_charges(m):
    tau = family_tau(2, m, 8)
    fam = build_virasoro(2, m, tau.K)
    assert fam.eigenvalue() == Fraction(m * (m + 1), 2)
    assert check_constraints(tau, fam, k_max=1).passed


@pytest.mark.parametrize("m", [1, 2])
def test_l2_constraint_fails_above_charge_zero(m):
    tau = family_tau(2, m, 10)
    report = check_constraints(tau, build_virasoro(2, m, tau.K), k_max=2)
    assert {f["mode"] for f in report.failures} == {2}


def test_trivial_tau_reported_coefficientwise():
    one = TauSeries.one(8, 8)
    report = check_constraints(one, build_virasoro(2, -1, 8), k_max=0)
    assert not report.passed
    assert {"mode": -1, "monomial": [[1, 2]], "residual": Fraction(1, 4), "weight": 2} in report.failures


def test_kontsevich_dictionary_matches_dvv():
    F = kdv_free_energy(family_tau(2, -1, 12))
    assert F[((0, 3),)] == Fraction(1, 6)
    assert F[((1, 1),)] == Fraction(1, 24)
    for key, value in F.items():
        assert value == free_energy_coefficient(dict(key)), key
    # every nonzero DVV coefficient of weight <= 12 shows up
    for n in range(1, 7):
        for lam in partitions(n):
            powers = {k: lam.count(k) for k in set(lam)}
            key = tuple(sorted((k - 1, e) for k, e in powers.items()))
            w = sum((2 * (k - 1) + 1) * e for k, e in powers.items())
            if w <= 12 and free_energy_coefficient({k - 1: e for k, e in powers.items()}):
                assert key in F, key


def test_dictionary_rejects_even_times():
    with pytest.raises(ValueError):
        kdv_free_energy(family_tau(3, -1, 6))


@pytest.mark.parametrize("g", range(1, 6))
def test_top_intersections(g):
    assert correlator((3 * g - 2,)) == oracles.top_intersection(g)


def test_known_intersections():
    assert correlator((0, 0, 0)) == 1
    assert correlator((1, 1, 1)) == Fraction(1, 12)
    assert correlator((2, 2, 2)) == Fraction(7, 240)
    assert correlator((2, 3)) == Fraction(29, 5760)
    assert correlator((1, 1)) == Fraction(1, 24)
    assert correlator((1, 2)) == 0  # dimension mismatch
    assert correlator((0, 0)) == 0  # unstable


@given(st.lists(st.integers(0, 4), min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_dilaton_equation(indices):
    n = len(indices)
    g = Fraction(sum(indices) + 3 - n, 3)
    if g.denominator != 1 or 2 * g - 2 + n <= 0:
        return
    assert correlator(tuple(indices) + (1,)) == (2 * int(g) - 2 + n) * correlator(tuple(indices))


@given(st.lists(st.integers(0, 5), min_size=2, max_size=4))
@settings(max_examples=60, deadline=None)
def test_string_equation(indices):
    g = Fraction(sum(indices) + 2 - len(indices), 3)
    if g.denominator != 1 or 2 * g - 2 + len(indices) <= 0:
        return
    lhs = correlator(tuple(indices) + (0,))
    rhs = sum(
        correlator(tuple(indices[:j]) + (a - 1,) + tuple(indices[j + 1 :])) for j, a in enumerate(indices) if a
    )
    assert lhs == rhs


def test_small_family_cap_does_not_change_the_verdict():
    tau = family_tau(2, -1, 10)
    narrow = check_constraints(tau, build_virasoro(2, -1, 6), k_max=2)
    wide = check_constraints(tau, build_virasoro(2, -1, 16), k_max=2)
    assert narrow.passed and wide.passed
    assert narrow.details["checked_up_to"] == wide.details["checked_up_to"] == {"L-1": 9, "L0": 7, "L1": 5, "L2": 3}
    assert check_commutation(build_virasoro(2, -1, 6), k_max=2, D=6).passed
