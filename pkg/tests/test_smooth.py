import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from liouville.smooth import (
    Add,
    Func,
    Pow,
    Var,
    DomainError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
    differentiate,
    evaluate,
    jet,
    parse_expression,
    taylor,
    to_string,
)

P = parse_expression


def test_parse_tree_shape():
    e = P("sin(x)^2 + 1")
    assert isinstance(e, Add)
    assert isinstance(e.left, Pow) and e.left.exponent == 2
    assert isinstance(e.left.base, Func) and e.left.base.name == "sin"
    assert isinstance(P("x"), Var)


@pytest.mark.parametrize(
    "text, offset",
    [("sin(", 4), ("x +* 2", 3), ("sin x", 4), ("(x", 2), ("", 0), ("x^1.5", 2)],
)
def test_syntax_errors_carry_offset(text, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        P(text)
    assert info.value.offset == offset
    assert info.value.expected


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as info:
        P("tan(x)")
    assert info.value.offset == 0


def test_numbers_and_signed_exponents():
    assert evaluate(P("1.5e-1 * 2"), 0.0) == pytest.approx(0.3)
    assert evaluate(P("x^-2"), 2.0) == 0.25
    assert evaluate(P("x^(-2)"), 2.0) == 0.25
    assert evaluate(P("-x^2"), 3.0) == -9.0


def test_differentiate_examples():
    assert evaluate(differentiate(P("x^3"), 2), 1.7) == pytest.approx(6 * 1.7)
    assert to_string(differentiate(P("exp(x)"), 5)) == "exp(x)"
    assert evaluate(differentiate(P("log(x)"), 2), 2.0) == pytest.approx(-0.25)
    e = P("sin(x)*x")
    assert differentiate(e, 0) is e


def test_order_cap():
    with pytest.raises(ValueError):
        differentiate(P("x"), 17)
    with pytest.raises(ValueError):
        jet(P("x"), 0.0, 17)


def test_jet_examples():
    assert jet(P("x^3"), 1.0, 3).values == (1.0, 3.0, 6.0, 6.0)
    assert jet(P("exp(x)"), 0.0, 2).values == (1.0, 1.0, 1.0)
    np.testing.assert_allclose(jet(P("sin(x)"), 0.0, 4).values, [0, 1, 0, -1, 0], atol=1e-15)


def test_domain_errors_name_the_node():
    with pytest.raises(DomainError) as info:
        evaluate(P("1 + log(x - 1)"), 0.5)
    assert "log" in str(info.value)
    with pytest.raises(DomainError):
        evaluate(P("1/(x - 1)"), 1.0)
    with pytest.raises(DomainError):
        jet(P("log(x)"), -1.0, 2)


def test_fraction_evaluation_is_exact():
    assert evaluate(P("x^3/3 - x"), Fraction(1, 2)) == Fraction(1, 24) - Fraction(1, 2)


def test_array_evaluation_broadcasts_constants():
    x = np.linspace(-1, 1, 7)
    np.testing.assert_array_equal(evaluate(P("3"), x) * np.ones_like(x), 3.0)
    np.testing.assert_allclose(evaluate(P("sinh(x)*cosh(x)"), x), np.sinh(x) * np.cosh(x))


def test_taylor_coefficients_against_sympy():
    xs = sp.Symbol("x")
    e = P("exp(sin(x)) / (2 + cos(x))")
    f = sp.exp(sp.sin(xs)) / (2 + sp.cos(xs))
    got = taylor(e, np.array([0.3]), 6)[:, 0]
    want = [float(sp.diff(f, xs, k).subs(xs, 0.3)) / math.factorial(k) for k in range(7)]
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-14)


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=12)


@settings(max_examples=40, deadline=None)
@given(coeffs=st.lists(rationals, min_size=1, max_size=6), x0=rationals, n=st.integers(0, 8))
def test_polynomial_jet_matches_symbolic_derivatives_exactly(coeffs, x0, n):
    text = " + ".join(f"({c.numerator}/{c.denominator})*x^{k}" for k, c in enumerate(coeffs))
    e = P(text)
    got = jet(e, x0, n).values
    for k in range(n + 1):
        assert got[k] == evaluate(differentiate(e, k), x0)


EXPRS = ["sin(x)*exp(x/3)", "log(2 + cos(x))", "x^-2 + cosh(x)", "sinh(x)^3 - 1/(1 + x^2)", "exp(-x^2)*x"]


@pytest.mark.parametrize("text", EXPRS)
def test_derivative_composition(text):
    e = P(text)
    x = np.linspace(0.5, 2.5, 100)
    for a, b in [(1, 2), (2, 2), (3, 1)]:
        lhs = evaluate(differentiate(differentiate(e, a), b), x)
        rhs = evaluate(differentiate(e, a + b), x)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("text", EXPRS + ["-(x - 2)^3", "2 - (x - 1) - (x + 1)", "x/(x/2)", "-x^2", "(-x)^2"])
def test_printer_round_trip(text):
    e = P(text)
    again = P(to_string(e))
    x = np.linspace(0.5, 2.5, 25)
    np.testing.assert_allclose(evaluate(again, x), evaluate(e, x), rtol=1e-15)
    d = differentiate(e, 3)
    np.testing.assert_allclose(evaluate(P(to_string(d)), x), evaluate(d, x), rtol=1e-13)


@pytest.mark.parametrize("text", EXPRS)
def test_jet_matches_sympy(text):
    xs = sp.Symbol("x")
    ref = sp.sympify(text.replace("^", "**"))
    got = jet(P(text), 1.3, 6).values
    for k in range(7):
        want = float(sp.diff(ref, xs, k).subs(xs, sp.Rational(13, 10)))
        assert got[k] == pytest.approx(want, rel=1e-11, abs=1e-11)


def test_operator_overloads():
    x = Var()
    e = (x + 1) * (x - 1) / 2 - -x
    assert e(3.0) == pytest.approx(7.0)
    assert (x**2)(3.0) == 9.0
    with pytest.raises(TypeError):
        x**0.5
    assert math.isclose(P("exp(1)")(0.0), math.e)
