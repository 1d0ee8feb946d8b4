from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hochrr.ratseries import (
    DomainViolation,
    FormalSeries,
    NonInvertibleConstantTerm,
    bernoulli_numbers,
    evaluate,
    exact,
    format_scalar,
    l_coefficients,
    series_arith,
    t_coefficients,
)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def series(order=6, const=None):
    coeffs = st.lists(fractions, min_size=order + 1, max_size=order + 1)
    if const is None:
        return coeffs.map(lambda c: FormalSeries.from_list(c, order))
    return coeffs.map(lambda c: FormalSeries.from_list([const] + c[1:], order))


def test_l_small_orders():
    assert l_coefficients(4) == [1, Fraction(-1, 2), Fraction(1, 12), 0, Fraction(-1, 720)]


def test_t_small_orders():
    assert t_coefficients(4) == [Fraction(-1, 2), Fraction(-1, 24), 0, Fraction(1, 2880)]


def test_l_are_bernoulli_over_factorial():
    B = bernoulli_numbers(12)
    assert l_coefficients(12) == [B[n] / factorial(n) for n in range(13)]


def test_bernoulli_known_values():
    assert bernoulli_numbers(10)[10] == Fraction(5, 66)
    assert bernoulli_numbers(12)[12] == Fraction(-691, 2730)


def test_odd_l_vanish_beyond_one():
    l = l_coefficients(15)
    assert all(l[n] == 0 for n in range(3, 16, 2))


def test_t_is_log_of_l():
    N = 10
    t = t_coefficients(N)
    back = series_arith("exp", FormalSeries.from_list([0] + t, N))
    assert list(back.coefficients) == l_coefficients(N)


def test_bad_orders():
    with pytest.raises(ValueError):
        l_coefficients(-1)
    with pytest.raises(ValueError):
        t_coefficients(0)


def test_division_needs_unit():
    a = FormalSeries.from_list([1, 1], 3)
    b = FormalSeries.from_list([0, 1], 3)
    with pytest.raises(NonInvertibleConstantTerm):
        series_arith("div", a, b)


def test_domains():
    with pytest.raises(DomainViolation):
        series_arith("log", FormalSeries.from_list([2, 1], 3))
    with pytest.raises(DomainViolation):
        series_arith("exp", FormalSeries.from_list([1, 1], 3))
    with pytest.raises(DomainViolation):
        series_arith("compose", FormalSeries.from_list([1], 3), FormalSeries.from_list([1, 1], 3))
    with pytest.raises(ValueError):
        series_arith("sqrt", FormalSeries.from_list([1], 3))


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        exact(0.5)


def test_format():
    assert format_scalar(Fraction(-3, 4)) == "-3/4"
    assert format_scalar(5) == "5"
    assert exact("2/6") == Fraction(1, 3)


def test_mixed_orders_truncate():
    a = FormalSeries.from_list([1, 2, 3, 4], 3)
    b = FormalSeries.from_list([1, 1], 1)
    assert (a * b).order == 1


def test_evaluate_horner():
    assert evaluate([1, 2, 3], Fraction(1, 2)) == 1 + 1 + Fraction(3, 4)


@settings(max_examples=40, deadline=None)
@given(series(), series(const=1))
def test_div_inverts_mul(a, b):
    assert (a * b) / b == a


@settings(max_examples=40, deadline=None)
@given(series(const=0))
def test_log_exp_roundtrip(a):
    e = series_arith("exp", a)
    assert series_arith("log", e) == a


@settings(max_examples=30, deadline=None)
@given(series(const=0), series(const=0))
def test_exp_is_multiplicative(a, b):
    assert series_arith("exp", a + b) == series_arith("exp", a) * series_arith("exp", b)


@settings(max_examples=30, deadline=None)
@given(series(), fractions)
def test_compose_with_linear_rescales(a, c):
    lin = FormalSeries.from_list([0, c], a.order)
    comp = series_arith("compose", a, lin)
    assert list(comp.coefficients) == [a[k] * c ** k for k in range(a.order + 1)]
