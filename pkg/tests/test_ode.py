import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liouville.ode import IntegrationError, derivative_jet, integrate_fundamental, wronskian_defect
from liouville.smooth import DomainError, parse_expression


def power_series_u_eq_x(x, terms=60):
    # g'' = x g, g(0)=1, g'(0)=0: a_{k+2} = a_{k-1} / ((k+2)(k+1))
    a = [1.0, 0.0, 0.0]
    for k in range(1, terms):
        a.append(a[k - 1] / ((k + 2) * (k + 1)))
    return sum(c * x**i for i, c in enumerate(a))


def test_linear_solution():
    s = integrate_fundamental("0", 0.0, 1.0, 2.0)
    assert s(2.0) == pytest.approx(2.0, abs=1e-12)
    assert s.derivative(2.0, 1) == pytest.approx(1.0, abs=1e-12)
    assert derivative_jet(s, 1.5, 3).values == pytest.approx((1.5, 1.0, 0.0, 0.0), abs=1e-12)


def test_constant_potential_closed_form():
    s = integrate_fundamental("1/4", 0.0, 1.0, 1.0)
    assert s(1.0) == pytest.approx(2 * math.sinh(0.5), abs=1e-10)
    c = integrate_fundamental("1/4", 1.0, 0.0, 1.0)
    ch, sh = math.cosh(0.5), math.sinh(0.5)
    assert derivative_jet(c, 1.0, 2).values == pytest.approx((ch, 0.5 * sh, 0.25 * ch), rel=1e-10)
    x = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(c(x), np.cosh(x / 2), rtol=1e-10)


def test_airy_type_potential():
    s = integrate_fundamental("x", 1.0, 0.0, 1.0)
    assert s(1.0) == pytest.approx(1.1723000, abs=1e-7)
    assert s(1.0) == pytest.approx(power_series_u_eq_x(1.0), abs=1e-10)
    assert s(-0.8) == pytest.approx(power_series_u_eq_x(-0.8), abs=1e-10)
    assert derivative_jet(s, 0.0, 3).values == pytest.approx((1.0, 0.0, 0.0, 1.0), abs=1e-12)


def test_initial_values_exact():
    s = integrate_fundamental("exp(x)", 0.3, -1.2, 2.0)
    g, gp = s.trajectory()[np.searchsorted(s.x, 0.0)][1:]
    assert float(g) == 0.3 and float(gp) == -1.2


def test_preconditions():
    with pytest.raises(ValueError):
        integrate_fundamental("1", 1.0, 0.0, 1.0, tol=1e-3)
    with pytest.raises(ValueError):
        integrate_fundamental("1", 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        integrate_fundamental("log(x)", 1.0, 0.0, 1.0)
    s = integrate_fundamental("1", 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        s(1.5)


def test_singular_potential_is_reported():
    with pytest.raises(IntegrationError):
        integrate_fundamental("1/(x - 0.5)^4", 1.0, 0.0, 1.0, max_steps=5000)
    with pytest.raises(DomainError):
        integrate_fundamental("1/(x - 0.5)", 1.0, 0.0, 1.0, fixed_step=0.125)


def test_wronskian_examples():
    u0 = parse_expression("0")
    a = integrate_fundamental(u0, 0.0, 1.0, 6.0)
    b = integrate_fundamental(u0, 1.0, 0.0, 6.0)
    assert wronskian_defect(a, b, 5.0) == pytest.approx(0.0, abs=1e-14)
    assert wronskian_defect(a, b, 0.0) == 0.0
    u = parse_expression("1/4")
    p = integrate_fundamental(u, 0.0, 1.0, 3.0)
    q = integrate_fundamental(u, 1.0, 0.0, 3.0)
    assert abs(wronskian_defect(p, q, 3.0)) <= 1e-9
    with pytest.raises(ValueError):
        wronskian_defect(p, integrate_fundamental("1/2", 1.0, 0.0, 3.0), 1.0)


def test_huge_values_stay_scaled():
    u = parse_expression("100")
    s = integrate_fundamental(u, 1.0, 0.0, 75.0, tol=1e-8)
    m, e = s.scaled_values(np.array([75.0]))[0::2]
    # g = cosh(10 x): log g(75) = 750 - log 2, beyond the float range
    assert math.log(abs(m[0])) + e[0] * math.log(2) == pytest.approx(750 - math.log(2), rel=1e-7)
    with pytest.raises(OverflowError):
        s(75.0)
    x = np.linspace(-75, 75, 1501)
    other = integrate_fundamental(u, 0.0, 1.0, 75.0, tol=1e-8)
    assert np.max(np.abs(wronskian_defect(s, other, x))) <= 1e-6


potentials = st.sampled_from(["1/4", "x", "exp(x)/4", "1 + sin(3*x)", "x^2/9", "cosh(x)/2 - 1"])


@settings(max_examples=20, deadline=None)
@given(u=potentials, a1=st.floats(-2, 2), b1=st.floats(-2, 2), a2=st.floats(-2, 2), b2=st.floats(-2, 2))
def test_linearity_and_abel(u, a1, b1, a2, b2):
    tol = 1e-10
    if abs(a1) + abs(b1) < 1e-3 or abs(a2) + abs(b2) < 1e-3 or abs(a1 + a2) + abs(b1 + b2) < 1e-3:
        return
    s1 = integrate_fundamental(u, a1, b1, 3.0, tol)
    s2 = integrate_fundamental(u, a2, b2, 3.0, tol)
    s12 = integrate_fundamental(u, a1 + a2, b1 + b2, 3.0, tol)
    x = np.linspace(-3, 3, 61)
    scale = np.abs(s1(x)) + np.abs(s2(x)) + 1.0
    assert np.max(np.abs(s12(x) - s1(x) - s2(x)) / scale) <= 10 * tol * 100
    assert np.max(np.abs(wronskian_defect(s1, s2, x))) <= 10 * tol * 100 or abs(a1 * b2 - b1 * a2) < 1e-3


def test_higher_derivatives_constant_potential():
    s = integrate_fundamental("1/4", 1.0, 0.0, 2.0)
    vals = derivative_jet(s, 1.2, 8).values
    for k, v in enumerate(vals):
        ref = 0.5**k * (math.cosh(0.6) if k % 2 == 0 else math.sinh(0.6))
        assert v == pytest.approx(ref, rel=1e-9)


def test_csv_dump(tmp_path):
    s = integrate_fundamental("1/4", 1.0, 0.0, 1.0)
    path = tmp_path / "g.csv"
    s.dump_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,g_mantissa,g_exp,gp_mantissa,gp_exp"
    assert len(lines) == s.n_nodes + 1


def test_fixed_step_is_deterministic():
    a = integrate_fundamental("x", 1.0, 0.0, 1.0, fixed_step=0.01)
    b = integrate_fundamental("x", 1.0, 0.0, 1.0, fixed_step=0.01)
    np.testing.assert_array_equal(a.g_mant, b.g_mant)
    assert a(1.0) == pytest.approx(1.1723000, abs=1e-7)
