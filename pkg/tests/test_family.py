from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bispectra.family import (
    FamilyConfig,
    bochner_operator,
    expand_in_family,
    generate_polynomial,
    recurrence_coefficients,
    verify_bispectrality,
)
from bispectra.weyl import DiffOperator, XPolynomial

GH = {d: FamilyConfig.gould_hopper(d) for d in range(1, 6)}


def poly(**c):
    return XPolynomial({int(k[1:]): v for k, v in c.items()})


def test_generate_examples():
    assert generate_polynomial(GH[2], 3) == poly(x3=1, x0=-2)
    assert generate_polynomial(GH[2], 6) == poly(x6=1, x3=-40, x0=40)
    assert generate_polynomial(GH[1], 3) == poly(x3=1, x1=-3)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_gould_hopper_closed_form(d):
    for n in range(25):
        assert generate_polynomial(GH[d], n) == XPolynomial(oracles.gould_hopper(d, n))


def test_bochner_examples():
    assert bochner_operator(GH[2]) == DiffOperator({(1, 1): 1, (0, 3): -1})
    assert bochner_operator(GH[1]) == DiffOperator({(1, 1): 1, (0, 2): -1})
    assert bochner_operator(GH[3]) == DiffOperator({(1, 1): 1, (0, 4): -1})


def test_recurrence_examples():
    assert recurrence_coefficients(GH[2], 2).gamma == {2: 2}
    assert recurrence_coefficients(GH[2], 3).gamma == {2: 6}
    assert recurrence_coefficients(GH[1], 2).gamma == {1: 2}


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_gould_hopper_recurrence_single_entry(d):
    for n in range(30):
        gamma = recurrence_coefficients(GH[d], n).gamma
        if n >= d:
            assert gamma == {d: Fraction(factorial(n), factorial(n - d))}
        else:
            assert gamma == {}


def test_verify_examples():
    assert verify_bispectrality(GH[2], 40).passed
    assert verify_bispectrality(GH[3], 30).passed
    for d in GH:
        assert verify_bispectrality(GH[d], 0).passed


def test_config_validation():
    with pytest.raises(ValueError):
        FamilyConfig(0, (1,))
    with pytest.raises(ValueError):
        FamilyConfig(2, (0, 1))
    with pytest.raises(ValueError):
        FamilyConfig(2, (0, 1, 0))
    with pytest.raises(ValueError):
        generate_polynomial(GH[2], -1)
    with pytest.raises(ValueError):
        verify_bispectrality(GH[2], -1)
    assert GH[2].is_gould_hopper()
    assert not FamilyConfig(2, (1, 0, Fraction(-1, 3))).is_gould_hopper()


def test_expand_round_trip():
    p = poly(x7=3, x4=Fraction(-1, 2), x0=5)
    coords = expand_in_family(GH[2], p)
    rebuilt = sum((generate_polynomial(GH[2], k) * c for k, c in coords.items()), XPolynomial())
    assert rebuilt == p


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=5)


@st.composite
def configs(draw):
    d = draw(st.integers(1, 3))
    lower = [draw(rationals) for _ in range(d)]
    lead = draw(rationals.filter(bool))
    return FamilyConfig(d, tuple(lower) + (lead,))


@given(configs())
@settings(max_examples=25, deadline=None)
def test_bispectrality_for_random_symbols(cfg):
    report = verify_bispectrality(cfg, 12)
    assert report.passed, report.failures


@given(configs())
@settings(max_examples=25, deadline=None)
def test_recurrence_band_width(cfg):
    # (d+2)-term recurrence: only P_(n+1) and P_n .. P_(n-d) occur
    for n in range(10):
        assert set(recurrence_coefficients(cfg, n).gamma) <= set(range(cfg.d + 1))
