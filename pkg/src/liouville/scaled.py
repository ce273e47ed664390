"""Mantissa/exponent reals that survive values beyond the float range.

``ScaledReal`` is the scalar type; the module-level array helpers do the same
bookkeeping for numpy arrays, where the exponent is an integer array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ScaledReal:
    """``mantissa * 2**exponent`` with ``1 <= |mantissa| < 2`` (or mantissa 0)."""

    mantissa: float
    exponent: int = 0

    def __post_init__(self):
        m = self.mantissa
        if m != 0 and not (1.0 <= abs(m) < 2.0):
            mm, ee = math.frexp(m)
            object.__setattr__(self, "mantissa", 2.0 * mm)
            object.__setattr__(self, "exponent", int(self.exponent) + ee - 1)
        if m == 0:
            object.__setattr__(self, "exponent", 0)

    @classmethod
    def from_float(cls, value: float) -> "ScaledReal":
        if not math.isfinite(value):
            raise ValueError(f"cannot scale non-finite value {value}")
        return cls(float(value), 0)

    def __float__(self):
        try:
            return math.ldexp(self.mantissa, self.exponent)
        except OverflowError:
            raise OverflowError(
                f"{self.mantissa}*2^{self.exponent} is not representable as a float"
            ) from None

    def __mul__(self, other):
        other = _coerce(other)
        return ScaledReal(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.mantissa == 0:
            raise ZeroDivisionError("division by a zero ScaledReal")
        return ScaledReal(self.mantissa / other.mantissa, self.exponent - other.exponent)

    def __add__(self, other):
        other = _coerce(other)
        if self.mantissa == 0:
            return other
        if other.mantissa == 0:
            return self
        e = max(self.exponent, other.exponent)
        m = math.ldexp(self.mantissa, self.exponent - e) + math.ldexp(other.mantissa, other.exponent - e)
        return ScaledReal(m, e)

    __radd__ = __add__

    def __neg__(self):
        return ScaledReal(-self.mantissa, self.exponent)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __abs__(self):
        return ScaledReal(abs(self.mantissa), self.exponent)

    def log_abs(self) -> float:
        """``log|value|``, finite for any nonzero value regardless of magnitude."""
        if self.mantissa == 0:
            raise ValueError("log of zero")
        return math.log(abs(self.mantissa)) + self.exponent * LOG2


def _coerce(v):
    if isinstance(v, ScaledReal):
        return v
    return ScaledReal.from_float(float(v))


def normalize(mantissa, exponent):
    """Bring array mantissas into ``[1, 2)`` in magnitude, adjusting exponents.

    Zero mantissas get exponent 0.
    """
    m, e = np.frexp(np.asarray(mantissa, dtype=float))
    e = e.astype(np.int64) + np.asarray(exponent, dtype=np.int64) - 1
    m = 2.0 * m
    e = np.where(m == 0, 0, e)
    return m, e


def unscale(mantissa, exponent):
    """Plain floats from mantissa/exponent arrays; ``OverflowError`` if any is too big."""
    exponent = np.asarray(exponent)
    with np.errstate(over="ignore"):
        out = np.ldexp(mantissa, exponent.astype(np.int32) if exponent.size else exponent)
    bad = np.isinf(out) & np.isfinite(mantissa)
    if np.any(bad):
        raise OverflowError("scaled value exceeds the float range")
    return out


def align_sum(m1, e1, m2, e2):
    """``m1*2**e1 + m2*2**e2`` as ``(m, e)`` with ``e = max(e1, e2)``; broadcasting.

    ``m1``/``m2`` may carry extra leading axes (e.g. a Taylor order axis) over
    the shape of the exponents.
    """
    e = np.maximum(e1, e2)
    s1 = np.ldexp(1.0, (e1 - e).astype(np.int32))
    s2 = np.ldexp(1.0, (e2 - e).astype(np.int32))
    return m1 * s1 + m2 * s2, e
