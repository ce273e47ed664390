"""Fundamental solutions of g'' = u g.

The equation is integrated as the first-order system

    d/dx (g, g') = [[0, 1], [u, 0]] (g, g'),    (g, g')(0) = (a, b)

outward from 0 to both ends of [-L, L] with the Dormand-Prince 5(4)
embedded pair. The state is renormalized by an exact power of two after every
step, so trajectories that grow like exp(sqrt(u) L) never overflow; the
running exponent is kept per node.

Between nodes, g and g' come from a two-point Hermite interpolant that
matches g, g', g'', g''' at both ends (the higher derivatives follow from the
equation itself), giving a dense output well below the step tolerance.
Derivatives of order >= 2 at a query point follow from the Leibniz recurrence

    g^(k+2) = sum_j C(k, j) u^(j) g^(k-j)

with exact derivatives of u.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .scaled import ScaledReal, unscale
from .smooth import Expr, Jet, as_expr, evaluate, jet, taylor

__all__ = [
    "IntegrationError",
    "FundamentalSolution",
    "integrate_fundamental",
    "derivative_jet",
    "wronskian_defect",
    "MAX_JET_ORDER",
]

MAX_JET_ORDER = 16

# Dormand-Prince 5(4)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B4
_BL = _B.tolist()
_EL = _E.tolist()

_HERMITE_ORDER = 3  # derivatives matched at each end


def _hermite_matrix(r):
    deg = 2 * r + 1
    rows = []
    for s in (0.0, 1.0):
        for k in range(r + 1):
            row = []
            for i in range(deg + 1):
                if i < k:
                    row.append(0.0)
                else:
                    row.append(math.perm(i, k) * (s ** (i - k) if i - k > 0 else 1.0))
            rows.append(row)
    return np.linalg.inv(np.array(rows))


_HERMITE_INV = _hermite_matrix(_HERMITE_ORDER)


class IntegrationError(RuntimeError):
    """The adaptive integrator could not make progress."""


@dataclass(frozen=True, eq=False)
class FundamentalSolution:
    """Solution of g'' = u g with g(0) = a, g'(0) = b on [-L, L].

    The trajectory is stored as mantissas ``g_mant``, ``gp_mant`` sharing a
    per-node base-2 ``exponent``: g(x_i) = g_mant[i] * 2**exponent[i].
    """

    u: Expr
    a: float
    b: float
    L: float
    tol: float
    x: np.ndarray
    g_mant: np.ndarray
    gp_mant: np.ndarray
    exponent: np.ndarray
    _coef: np.ndarray = field(repr=False)

    @property
    def n_nodes(self):
        return len(self.x)

    def trajectory(self):
        """Node list of ``(x, g, g')`` with ScaledReal values."""
        return [
            (float(xi), ScaledReal(float(gm), int(e)), ScaledReal(float(gpm), int(e)))
            for xi, gm, gpm, e in zip(self.x, self.g_mant, self.gp_mant, self.exponent)
        ]

    def dump_csv(self, path):
        """Write the trajectory as ``x, g_mantissa, g_exp, gp_mantissa, gp_exp``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "g_mantissa", "g_exp", "gp_mantissa", "gp_exp"])
            for xi, g, gp in self.trajectory():
                w.writerow([repr(xi), repr(g.mantissa), g.exponent, repr(gp.mantissa), gp.exponent])

    def _check_domain(self, x):
        slack = 1e-12 * max(1.0, self.L)
        if np.any(np.abs(x) > self.L + slack):
            bad = np.max(np.abs(x))
            raise ValueError(f"point |x| = {bad} outside the integration domain [-{self.L}, {self.L}]")

    def scaled_values(self, x):
        """Dense output ``(g_mant, gp_mant, exponent)`` at array ``x``."""
        x = np.asarray(x, dtype=float)
        self._check_domain(x)
        idx = np.clip(np.searchsorted(self.x, x, side="right") - 1, 0, len(self.x) - 2)
        x0 = self.x[idx]
        h = self.x[idx + 1] - x0
        s = (x - x0) / h
        coef = self._coef[idx]  # (..., deg+1): coefficients of g in powers of s
        deg = coef.shape[-1] - 1
        p = np.zeros_like(s)
        dp = np.zeros_like(s)
        for i in range(deg, -1, -1):
            p = p * s + coef[..., i]
        for i in range(deg, 0, -1):
            dp = dp * s + i * coef[..., i]
        return p, dp / h, self.exponent[idx]

    def scaled_jet(self, x, n):
        """Mantissa jet ``(n+1, *x.shape)`` and exponent array at ``x``."""
        if n > MAX_JET_ORDER:
            raise ValueError(f"jet order {n} exceeds the cap {MAX_JET_ORDER}")
        x = np.asarray(x, dtype=float)
        g, gp, e = self.scaled_values(x)
        vals = np.empty((n + 1,) + x.shape)
        vals[0] = g
        if n >= 1:
            vals[1] = gp
        if n >= 2:
            ud = jet(self.u, x, n - 2).values
            for k in range(n - 1):
                acc = np.zeros(x.shape)
                for j in range(k + 1):
                    acc = acc + math.comb(k, j) * ud[j] * vals[k - j]
                vals[k + 2] = acc
        return vals, e

    def derivative(self, x, k):
        """Unscaled ``g^(k)(x)``."""
        vals, e = self.scaled_jet(x, k)
        return unscale(vals[k], e)

    def __call__(self, x):
        return self.derivative(x, 0)


def _rk_direction(u, y0, L, sign, tol, fixed_step, h_init, max_steps):
    """March from 0 to sign*L; returns node abscissae, mantissas and exponents."""
    # the stage loop runs on Python floats: per-step numpy calls on a
    # 2-vector cost more than the arithmetic itself
    a0, b0 = float(y0[0]), float(y0[1])
    # shared exponent for the pair: scale by the larger component
    E = math.frexp(max(abs(a0), abs(b0)))[1] if (a0 or b0) else 0
    g, gp = math.ldexp(a0, -E), math.ldexp(b0, -E)
    xs, gs, gps, Es = [0.0], [g], [gp], [E]
    x = 0.0
    end = sign * L
    h = fixed_step if fixed_step else h_init
    hmin = 1e-13 * max(1.0, L)
    eps_end = 1e-14 * max(1.0, L)
    n_reject = 0
    fac = 1.0
    while sign * (end - x) > eps_end:
        h = min(h, abs(end - x))
        step = sign * h
        uc = np.broadcast_to(evaluate(u, x + _C * step), _C.shape)
        if not np.all(np.isfinite(uc)):
            raise IntegrationError(f"potential is not finite near x = {x}")
        uc = uc.tolist()
        k0, k1 = [], []
        for i in range(7):
            yi0, yi1 = g, gp
            for j, aij in enumerate(_A[i]):
                c = step * aij
                yi0 += c * k0[j]
                yi1 += c * k1[j]
            k0.append(yi1)
            k1.append(uc[i] * yi0)
        g_new = g + step * sum(b * k for b, k in zip(_BL, k0))
        gp_new = gp + step * sum(b * k for b, k in zip(_BL, k1))
        if fixed_step:
            accept = True
        else:
            err = abs(step) * max(abs(sum(e * k for e, k in zip(_EL, k0))), abs(sum(e * k for e, k in zip(_EL, k1))))
            scale = tol * h * max(abs(g), abs(gp), abs(g_new), abs(gp_new))
            ratio = err / scale if scale > 0 else 0.0
            accept = ratio <= 1.0
            fac = 5.0 if ratio == 0 else min(5.0, max(0.2, 0.9 * ratio ** (-0.25)))
        if accept:
            x = x + step
            if abs(end - x) <= eps_end:
                x = end
            shift = math.frexp(max(abs(g_new), abs(gp_new)))[1]
            g, gp = math.ldexp(g_new, -shift), math.ldexp(gp_new, -shift)
            E += shift
            xs.append(x)
            gs.append(g)
            gps.append(gp)
            Es.append(E)
            n_reject = 0
            if not fixed_step:
                h = h * fac
            if len(xs) > max_steps:
                raise IntegrationError(f"no convergence: {max_steps} steps taken before reaching x = {end}")
        else:
            h = h * fac
            n_reject += 1
            if h < hmin or n_reject > 50:
                raise IntegrationError(f"step size underflow at x = {x}")
    return np.array(xs), np.column_stack([gs, gps]), np.array(Es, dtype=np.int64)


def _hermite_coefficients(u, x, y, E):
    """Per-interval degree-7 polynomial coefficients of g in s = (x - x_i)/h_i."""
    r = _HERMITE_ORDER
    ud = taylor(u, x, r - 2)  # u, u' as Taylor coefficients (u' = 1! * coef)
    g, gp = y[:, 0], y[:, 1]
    d = np.empty((r + 1, len(x)))
    d[0], d[1] = g, gp
    d[2] = ud[0] * g
    d[3] = ud[1] * g + ud[0] * gp
    h = np.diff(x)
    rel = np.ldexp(1.0, (E[1:] - E[:-1]).astype(np.int32))
    data = np.empty((len(h), 2 * (r + 1)))
    for k in range(r + 1):
        data[:, k] = d[k, :-1] * h**k
        data[:, r + 1 + k] = d[k, 1:] * rel * h**k
    return data @ _HERMITE_INV.T


def integrate_fundamental(u, a: float, b: float, L: float, tol: float = 1e-10, fixed_step=None,
                         max_steps: int = 2_000_000):
    """Integrate g'' = u g, g(0) = a, g'(0) = b, on [-L, L].

    Parameters
    ----------
    u : Expr or str
        Potential; must be evaluable on [-L, L].
    a, b : float
        Initial value and slope at 0.
    L : float
        Half-width of the domain.
    tol : float
        Local error bound per unit step, relative to the state magnitude;
        must lie in (0, 1e-4].
    fixed_step : float, optional
        Disable step-size control and march with this step (reproducibility
        fallback; the accuracy is then whatever the step gives).
    max_steps : int
        Accepted steps allowed per direction before giving up; guards
        against potentials with nearby singularities, where the step
        shrinks geometrically.
    """
    u = as_expr(u)
    if not L > 0:
        raise ValueError("domain radius L must be positive")
    if not 0 < tol <= 1e-4:
        raise ValueError("tolerance must lie in (0, 1e-4]")
    if fixed_step is not None and not fixed_step > 0:
        raise ValueError("fixed step must be positive")
    if a == 0 and b == 0:
        raise ValueError("initial data (0, 0) gives the trivial solution")
    h_init = min(0.05, L) * (tol / 1e-10) ** 0.2
    h_init = min(h_init, L)
    xp, yp, ep = _rk_direction(u, (a, b), L, +1, tol, fixed_step, h_init, max_steps)
    xn, yn, en = _rk_direction(u, (a, b), L, -1, tol, fixed_step, h_init, max_steps)
    x = np.concatenate([xn[:0:-1], xp])
    y = np.concatenate([yn[:0:-1], yp])
    E = np.concatenate([en[:0:-1], ep])
    coef = _hermite_coefficients(u, x, y, E)
    return FundamentalSolution(
        u=u, a=float(a), b=float(b), L=float(L), tol=float(tol),
        x=x, g_mant=y[:, 0].copy(), gp_mant=y[:, 1].copy(), exponent=E, _coef=coef,
    )


def derivative_jet(s: FundamentalSolution, x, n: int) -> Jet:
    """Derivatives ``g(x), g'(x), ..., g^(n)(x)``, unscaled.

    Raises ``OverflowError`` if the values do not fit in a float.
    """
    vals, e = s.scaled_jet(x, n)
    out = unscale(vals, e)
    if np.ndim(x) == 0:
        return Jet(float(x), n, tuple(float(v) for v in out))
    return Jet(np.asarray(x, dtype=float), n, out)


def wronskian_defect(s1: FundamentalSolution, s2: FundamentalSolution, x):
    """Relative drift of the Wronskian g1 g2' - g1' g2 between 0 and ``x``.

    The drift is divided by |g1 g2'| + |g1' g2| at ``x`` (and by the initial
    Wronskian if that is larger), all in scaled arithmetic.
    """
    if s1.u != s2.u:
        raise ValueError("fundamental solutions belong to different potentials")
    if s1.L != s2.L:
        raise ValueError("fundamental solutions live on different domains")
    xa = np.asarray(x, dtype=float)
    g1, g1p, e1 = s1.scaled_values(xa)
    g2, g2p, e2 = s2.scaled_values(xa)
    w0 = s1.a * s2.b - s1.b * s2.a
    e = (e1 + e2).astype(np.int64)
    # w0 * 2**-e, clamped against underflow of huge exponents
    w0s = np.ldexp(w0, np.clip(-e, -1100, 1100).astype(np.int32))
    num = g1 * g2p - g1p * g2 - w0s
    den = np.maximum(np.abs(g1 * g2p) + np.abs(g1p * g2), np.abs(w0s))
    out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return float(out) if np.ndim(x) == 0 else out
