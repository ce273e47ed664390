import itertools
import math
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from liouville.faa_di_bruno import (
    composition_coefficient,
    enumerate_compositions,
    exp_derivative,
    exp_derivative_factor,
    log_derivative_1d,
    log_derivative_mixed,
    log_derivative_mixed_complete,
    verify_formulas,
)

x, t = sp.symbols("x t")


def brute(kind, *params):
    if kind == "R" and len(params) == 1:
        (b,) = params
        cands = itertools.product(range(b + 1), repeat=b)
        return sorted(a for a in cands if sum((j + 1) * v for j, v in enumerate(a)) == b)
    lam, mu = params
    if kind == "R":
        cands = itertools.product(range(mu + 1), repeat=lam + 1)
        return sorted(a for a in cands if sum(j * v for j, v in enumerate(a)) == lam and sum(a) == mu)
    cands = itertools.product(range(mu + 1), repeat=lam)
    return sorted(a for a in cands if sum(a) == mu)


def test_enumeration_examples():
    assert list(enumerate_compositions("R", 1)) == [(1,)]
    assert set(enumerate_compositions("R", 3)) == {(3, 0, 0), (1, 1, 0), (0, 0, 1)}
    assert set(enumerate_compositions("R", 2, 2)) == {(0, 2, 0), (1, 0, 1)}
    assert len(enumerate_compositions("T", 2, 3)) == 4


@pytest.mark.parametrize("kind, params", [("R", (b,)) for b in range(1, 7)] + [("R", (l, m)) for l in range(4) for m in range(4)] + [("T", (l, m)) for l in range(1, 4) for m in range(4)])
def test_enumeration_matches_brute_force(kind, params):
    got = list(enumerate_compositions(kind, *params))
    assert got == brute(kind, *params)
    assert len(set(got)) == len(got)


def test_partition_counts_and_bound():
    for b in range(1, 21):
        n = len(enumerate_compositions("R", b))
        assert n == sp.functions.combinatorial.numbers.partition(b)
        assert n <= math.comb(2 * b, b - 1)


def test_enumeration_guards():
    with pytest.raises(ValueError):
        enumerate_compositions("R", 25)
    with pytest.raises(ValueError):
        enumerate_compositions("R", 0)
    with pytest.raises(ValueError):
        enumerate_compositions("R", -1, 2)
    with pytest.raises(ValueError):
        enumerate_compositions("Q", 1)


def test_coefficient_examples():
    assert composition_coefficient("P", 3, (1, 1, 0)) == 3
    assert composition_coefficient("l", 3, (1, 1, 0)) == 2
    assert composition_coefficient("N", (2, 3), (2, 1)) == 3
    with pytest.raises(ValueError):
        composition_coefficient("P", 3, (1, 0, 0))
    with pytest.raises(ValueError):
        composition_coefficient("N", (2, 3), (2, 2))


def test_w_readings():
    assert composition_coefficient("W", (1, 1), (0, 1)) == 1
    with pytest.raises(ZeroDivisionError):
        composition_coefficient("W", (1, 1), (0, 1), reading="literal")
    assert composition_coefficient("W", (2, 3), (1, 2, 0), reading="literal") == Fraction(6, 1) * 2 // 2 // 1
    with pytest.raises(ValueError):
        composition_coefficient("W", (1, 1), (0, 1), reading="other")


def test_coefficient_positivity():
    for b in range(1, 9):
        for a in enumerate_compositions("R", b):
            assert composition_coefficient("P", b, a) >= 1
    for lam in range(0, 5):
        for mu in range(0, 5):
            for a in enumerate_compositions("R", lam, mu):
                w = composition_coefficient("W", (lam, mu), a)
                assert isinstance(w, int) and w >= 1
            if lam:
                for a in enumerate_compositions("T", lam, mu):
                    assert composition_coefficient("N", (lam, mu), a) >= 1


def test_p_sums_to_bell_numbers():
    for b in range(1, 10):
        assert sum(composition_coefficient("P", b, a) for a in enumerate_compositions("R", b)) == sp.bell(b)


def test_exp_examples():
    assert exp_derivative([0.0, 1.0], 1) == 1.0
    assert exp_derivative([1.0, 2.0, 2.0], 2) == pytest.approx(6 * math.e)
    assert exp_derivative([1.0, 2.0, 2.0], 2) == pytest.approx(16.30969097, rel=1e-9)
    coeffs = sorted(composition_coefficient("P", 3, a) for a in enumerate_compositions("R", 3))
    assert coeffs == [1, 1, 3]
    with pytest.raises(ValueError):
        exp_derivative([0.0, 1.0], 2)


def test_log_examples():
    assert log_derivative_1d([0.0, 1.0], 1) == 1.0
    assert log_derivative_1d([1.0, 1.0, 0.0], 2) == pytest.approx(-0.25)
    xs = sp.Rational(3, 10)
    J = x + x**3
    jet = [float(sp.diff(J, x, k).subs(x, xs)) for k in range(5)]
    want = float(sp.diff(sp.log(1 + J), x, 4).subs(x, xs))
    assert log_derivative_1d(jet, 4) == pytest.approx(want, abs=1e-10)
    with pytest.raises(ValueError):
        log_derivative_1d([-1.0, 1.0], 1)


rat = st.fractions(min_value=-2, max_value=2, max_denominator=9)


@settings(max_examples=25, deadline=None)
@given(coeffs=st.lists(rat, min_size=2, max_size=5), x0=rat, beta=st.integers(1, 6))
def test_items_1_and_2_exact_against_sympy(coeffs, x0, beta):
    h = sum(sp.Rational(c.numerator, c.denominator) * x**k for k, c in enumerate(coeffs))
    p = sp.Rational(x0.numerator, x0.denominator)
    jet = [Fraction(str(sp.diff(h, x, k).subs(x, p))) for k in range(beta + 1)]
    want = sp.simplify(sp.diff(sp.exp(h), x, beta) / sp.exp(h)).subs(x, p)
    assert exp_derivative_factor(jet, beta) == Fraction(str(want))
    if 1 + jet[0] > 0:
        want = sp.diff(sp.log(1 + h), x, beta).subs(x, p)
        assert log_derivative_1d(jet, beta) == Fraction(str(want))


def mixed_table(J, pt, g, b):
    return [[float(sp.diff(J, t, j, x, k).subs({t: pt[0], x: pt[1]})) for k in range(b + 1)] for j in range(g + 1)]


def mixed_oracle(J, pt, g, b):
    return float(sp.diff(sp.log(1 + J), t, g, x, b).subs({t: pt[0], x: pt[1]}))


def test_mixed_first_order_example():
    tab = mixed_table(t * x, (1, 1), 1, 1)
    assert log_derivative_mixed(tab, 1, 1) == pytest.approx(0.25)


def test_mixed_zero_function():
    for g in range(1, 4):
        for b in range(1, 4):
            tab = [[0.0] * (b + 1) for _ in range(g + 1)]
            assert log_derivative_mixed(tab, g, b) == 0
            assert log_derivative_mixed_complete(tab, g, b) == 0


def test_mixed_guards():
    with pytest.raises(ValueError):
        log_derivative_mixed([[0.0, 1.0]], 1, 1)
    with pytest.raises(ValueError):
        log_derivative_mixed([[-1.0, 0.0], [0.0, 0.0]], 1, 1)
    with pytest.raises(ValueError):
        log_derivative_mixed([[0.0] * 12] * 12, 6, 5)


POLYS = [
    (t * x, (1, 1)),
    (t**2 * x, (sp.Rational(1, 2), sp.Rational(1, 2))),
    (t * x + t**3 * x**2 + x**3 / 3 + t**2, (sp.Rational(1, 3), sp.Rational(2, 5))),
]


@pytest.mark.parametrize("J, pt", POLYS)
def test_complete_mixed_formula_against_sympy(J, pt):
    for total in range(1, 6):
        for g in range(0, total + 1):
            b = total - g
            tab = mixed_table(J, pt, g, b)
            assert log_derivative_mixed_complete(tab, g, b) == pytest.approx(mixed_oracle(J, pt, g, b), rel=1e-9, abs=1e-9)


def test_two_part_formula_misses_mixed_partitions():
    # d_t^2 d_x log(1 + t^2 x) contains the product d_t J * d_t d_x J, which
    # no term of the two-part sum can produce
    J, pt = t**2 * x, (sp.Rational(1, 2), sp.Rational(1, 2))
    tab = mixed_table(J, pt, 2, 1)
    want = mixed_oracle(J, pt, 2, 1)
    assert log_derivative_mixed_complete(tab, 2, 1) == pytest.approx(want, abs=1e-12)
    assert abs(log_derivative_mixed(tab, 2, 1) - want) > 0.5


def test_verification_report():
    rows = verify_formulas(max_order=4, max_mixed=4, max_partition=12)
    by = {}
    for r in rows:
        by.setdefault(r.formula, []).append(r)
    assert all(r.passed for r in by["partition_count"] + by["exp"] + by["log_1d"] + by["log_mixed_complete"])
    assert [r.order for r in by["log_mixed[a0!]"] if r.passed] == [(1, 1)]
    assert all(not r.passed and "undefined" in r.note for r in by["log_mixed[a0]"])
