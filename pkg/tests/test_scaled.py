import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liouville.scaled import ScaledReal, align_sum, normalize, unscale

finite = st.floats(min_value=-1e300, max_value=1e300, allow_nan=False).filter(lambda v: v == 0 or abs(v) > 1e-300)


@given(finite)
def test_round_trip(v):
    s = ScaledReal.from_float(v)
    assert float(s) == v
    assert s.mantissa == 0 or 1 <= abs(s.mantissa) < 2


@given(finite, finite)
def test_arithmetic_matches_floats(a, b):
    A, B = ScaledReal.from_float(a), ScaledReal.from_float(b)
    assert float(A * B) == pytest.approx(a * b, rel=1e-15) if math.isfinite(a * b) and abs(a * b) > 1e-300 else True
    assert float(A + B) == pytest.approx(a + b, rel=1e-15, abs=1e-300)
    if b != 0:
        q = a / b
        if math.isfinite(q) and (q == 0 or abs(q) > 1e-300):
            assert float(A / B) == pytest.approx(q, rel=1e-15)


def test_beyond_float_range():
    big = ScaledReal(1.5, 5000)
    with pytest.raises(OverflowError):
        float(big)
    assert (big / ScaledReal(1.5, 4990)).__float__() == 1024.0
    assert big.log_abs() == pytest.approx(math.log(1.5) + 5000 * math.log(2))
    assert float(big - big) == 0.0
    with pytest.raises(ValueError):
        ScaledReal(0.0).log_abs()
    with pytest.raises(ZeroDivisionError):
        big / 0.0


def test_array_helpers():
    m, e = normalize(np.array([3.0, -0.25, 0.0]), np.array([0, 10, 7]))
    np.testing.assert_array_equal(m, [1.5, -1.0, 0.0])
    np.testing.assert_array_equal(e, [1, 8, 0])
    np.testing.assert_array_equal(unscale(m, e), [3.0, -256.0, 0.0])
    with pytest.raises(OverflowError):
        unscale(np.array([1.0]), np.array([2000]))
    s, ee = align_sum(np.array([1.0]), np.array([3]), np.array([1.0]), np.array([1]))
    assert unscale(s, ee)[0] == 10.0
