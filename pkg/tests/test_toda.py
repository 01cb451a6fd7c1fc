from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bispectra.family import FamilyConfig
from bispectra.toda import (
    BandOverflow,
    PseudoDiffOperator,
    TruncationInsufficient,
    bracket,
    dth_root,
    flow_rhs,
    integer_power_flow,
    invert_upper,
    lambda_dressing,
    lax_operator,
    lower_dressing,
    monic_lax,
    project_minus,
    project_plus,
    shift,
    solve_difference,
    verify_flows,
    verify_lambda_dressing,
    verify_root,
)
from bispectra.weyl import XPolynomial

Lam = PseudoDiffOperator.shift_power


def S(*coeffs):
    return XPolynomial(dict(enumerate(coeffs)))


def test_shift_rule_examples():
    assert Lam(1) * Lam(-2, S(0, 1)) == Lam(-1, S(1, 1))
    A = Lam(1, S(1, 1))
    assert A * A == Lam(2, S(2, 3, 1))
    assert shift(S(0, 0, 1), 2) == S(4, 4, 1)


def test_projections():
    P = PseudoDiffOperator({2: S(1), 0: S(0, 1), -1: S(3), -3: S(1, 1)})
    assert project_plus(P) == PseudoDiffOperator({2: S(1), 0: S(0, 1)})
    assert project_minus(P) == PseudoDiffOperator({-1: S(3), -3: S(1, 1)})


def test_lax_examples():
    assert lax_operator(1) == PseudoDiffOperator({1: S(1, 1), -1: S(1)})
    assert lax_operator(FamilyConfig.gould_hopper(2)) == PseudoDiffOperator({1: S(1, 1), -2: S(1)})
    with pytest.raises(ValueError):
        lax_operator(FamilyConfig(2, (1, 0, Fraction(-1, 3))))


def test_pure_shift_root():
    R = dth_root(Lam(-2), order=6)
    assert {k: f for k, f in R.terms.items()} == {-1: S(1)}


def test_band_bookkeeping():
    U = PseudoDiffOperator({0: S(1), 1: S(0, 1)}, "upper", ceil=3)
    with pytest.raises(BandOverflow):
        U[4]
    assert U[3].is_zero()
    with pytest.raises(ValueError):
        U + PseudoDiffOperator({0: S(1)}, "lower", floor=-2)
    with pytest.raises(ValueError):
        PseudoDiffOperator({}, "sideways")
    with pytest.raises(ValueError):
        Lam(1).power(-1)


def test_solve_difference():
    r = S(1, -2, 3)
    for step in (1, 2, 3):
        u = solve_difference(r, step)
        assert u - shift(u, -step) == r
        assert u[0] == 0
    with pytest.raises(ValueError):
        solve_difference(r, 0)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_dressing_intertwines(d):
    D = lax_operator(d)
    W = lower_dressing(D, 10)
    lhs, rhs = D * W, W * Lam(-d)
    for deg in range(-d, 10 - d):
        assert lhs[deg] == rhs[deg]
    V = invert_upper(W)
    prod = W * V
    assert all(prod[k] == (S(1) if k == 0 else XPolynomial()) for k in range(0, 11))


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_roots(d):
    report = verify_root(lax_operator(d), order=10)
    assert report.passed, report.failures


@pytest.mark.parametrize("d", [2, 3])
def test_flows(d):
    report = verify_flows(lax_operator(d), (1, 2, 3, 4), order=10)
    assert report.passed, report.failures


def test_second_flow_is_integer_power_for_d2():
    D = lax_operator(2)
    res = flow_rhs(D, 2, order=8)
    direct = integer_power_flow(D, 1)
    lo, hi = res.band
    for deg in range(lo, hi + 1):
        assert res.rhs()[deg] == direct.terms.get(deg, XPolynomial())
    # [D_+, D] = [(s+1) Lam, Lam^-2] = (s+1 - (s-1)) Lam^-1 = 2 Lam^-1
    assert res.rhs() == Lam(-1, S(2))


def test_flow_order_must_be_positive():
    with pytest.raises(ValueError):
        flow_rhs(lax_operator(2), 0)
    with pytest.raises(ValueError):
        dth_root(lax_operator(2), order=0)
    with pytest.raises(ValueError):
        dth_root(lax_operator(2), d=3)
    assert issubclass(TruncationInsufficient, ArithmeticError)


def test_higher_order_keeps_lower_coefficients():
    a = dth_root(lax_operator(3), order=6)
    b = dth_root(lax_operator(3), order=10)
    for deg in range(-1, a.ceil + 1):
        assert a[deg] == b[deg]


@pytest.mark.parametrize("d", [1, 2, 3])
def test_lambda_dressing(d):
    assert monic_lax(d).terms[1] == S(1)
    assert verify_lambda_dressing(d, 10).passed
    assert lambda_dressing(d, 10).floor == -10


polys = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=1, max_size=3).map(
    lambda cs: XPolynomial(dict(enumerate(cs)))
)
finite_ops = st.dictionaries(st.integers(-3, 3), polys, max_size=3).map(PseudoDiffOperator)


@given(finite_ops, finite_ops, finite_ops)
@settings(max_examples=40, deadline=None)
def test_composition_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(finite_ops, finite_ops)
@settings(max_examples=40, deadline=None)
def test_split_and_jacobi(a, b):
    assert project_plus(a) + project_minus(a) == a
    c = Lam(1, S(1, 1)) + Lam(-2)
    jac = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
    assert jac.terms == {}
