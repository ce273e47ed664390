"""Smooth solutions of the Liouville equation from Cauchy data.

The equation is

    (d_t^2 - d_x^2) F + (m^2/2) exp(F) = 0,    F(0, .) = f1,  d_t F(0, .) = f2.

The solution is built from four functions of one variable,

    G(t, x) = g1(x+t) g2(x-t) + g3(x+t) g4(x-t),
    F = -log((m^2/16) G^2) = -2 log|G| - 2 log(m/4),

where g2, g4 solve g'' = u g with (g, g')(0) = (0, 1) and (1, 0) for the
potential

    u = [(f1' - f2)^2 - 4 (f1' - f2)' + m^2 exp(f1)] / 16

and g1, g3 are explicit combinations of g4, g2 and the data:

    g1 = -(4/m) exp(-f1/2) [g4' + (f1' - f2) g4 / 4]
    g3 =  (4/m) exp(-f1/2) [g2' + (f1' - f2) g2 / 4].

They satisfy g1 g3' - g1' g3 = 1 and g2 g4' - g2' g4 = -1, and g1, g3 solve
g'' = w g with w the same expression with f1' + f2 in place of f1' - f2.

All products of g's are formed on mantissas with separate base-2 exponents,
so G may be far outside the float range while F stays accurate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ode import FundamentalSolution, integrate_fundamental
from .scaled import LOG2, align_sum, unscale
from .smooth import Const, Expr, Func, as_expr, differentiate, evaluate, taylor

__all__ = [
    "InitialData",
    "PotentialPair",
    "Quartet",
    "SolutionField",
    "MAX_PARTIAL_ORDER",
    "compute_potentials",
    "build_quartet",
    "solve",
    "evaluate_solution",
    "solution_partial_jet",
    "residual",
    "restrict_initial",
    "diagnostics",
    "DiagnosticReport",
]

MAX_PARTIAL_ORDER = 8


@dataclass(frozen=True)
class InitialData:
    """Cauchy data ``F(0, .) = f1``, ``d_t F(0, .) = f2`` and the mass ``m > 0``.

    ``f1`` and ``f2`` may be given as expression text.
    """

    f1: Expr
    f2: Expr
    m: float

    def __post_init__(self):
        object.__setattr__(self, "f1", as_expr(self.f1))
        object.__setattr__(self, "f2", as_expr(self.f2))
        if not (isinstance(self.m, (int, float)) and math.isfinite(self.m) and self.m > 0):
            raise ValueError(f"mass parameter must be a positive real, got {self.m!r}")
        object.__setattr__(self, "m", float(self.m))


@dataclass(frozen=True)
class PotentialPair:
    u: Expr
    w: Expr


def _potential(f1, s, m):
    return Const(Fraction(1, 16)) * (s**2 - 4 * differentiate(s) + (m * m) * Func("exp", f1))


def compute_potentials(d: InitialData) -> PotentialPair:
    """Potentials ``u`` (from f1' - f2) and ``w`` (from f1' + f2)."""
    df1 = differentiate(d.f1)
    return PotentialPair(
        u=_potential(d.f1, df1 - d.f2, d.m),
        w=_potential(d.f1, df1 + d.f2, d.m),
    )


def _shift(c):
    """Taylor coefficients of the derivative: (k+1) c[k+1]."""
    k = np.arange(1, c.shape[0]).reshape((-1,) + (1,) * (c.ndim - 1))
    return c[1:] * k


def _series_mul(a, b):
    n = min(a.shape[0], b.shape[0])
    out = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(n):
        for j in range(k + 1):
            out[k] += a[j] * b[k - j]
    return out


def _fact_col(n, ndim):
    f = np.array([math.factorial(k) for k in range(n + 1)], dtype=float)
    return f.reshape((-1,) + (1,) * ndim)


@dataclass(frozen=True, eq=False)
class Quartet:
    """The four generating functions of a solution.

    ``g2``, ``g4`` are integrated; ``g1``, ``g3`` are evaluated on demand from
    them and the data. Values are exposed as scaled Taylor coefficients.
    """

    data: InitialData
    potentials: PotentialPair
    g2: FundamentalSolution
    g4: FundamentalSolution
    L: float
    tol: float
    _prefactor: Expr = field(repr=False)
    _shear: Expr = field(repr=False)

    @property
    def m(self):
        return self.data.m

    def taylor_scaled(self, x, n):
        """Scaled Taylor coefficients of g1..g4 at ``x`` through order ``n``.

        Returns ``(coeffs, exps)``: four arrays of shape ``(n+1, *x.shape)``
        and four exponent arrays, ``g_i^(k)(x)/k! = coeffs[i][k] * 2**exps[i]``.
        """
        x = np.asarray(x, dtype=float)
        v2, e2 = self.g2.scaled_jet(x, n + 1)
        v4, e4 = self.g4.scaled_jet(x, n + 1)
        c2 = v2 / _fact_col(n + 1, x.ndim)
        c4 = v4 / _fact_col(n + 1, x.ndim)
        pref = taylor(self._prefactor, x, n)
        shear = taylor(self._shear, x, n)
        c1 = -_series_mul(pref, _shift(c4) + _series_mul(shear, c4[: n + 1]))
        c3 = _series_mul(pref, _shift(c2) + _series_mul(shear, c2[: n + 1]))
        return (c1, c2[: n + 1], c3, c4[: n + 1]), (e4, e2, e2, e4)

    def jets(self, x, n):
        """Unscaled derivative values of g1..g4 at ``x``: four ``(n+1, ...)`` arrays."""
        coeffs, exps = self.taylor_scaled(x, n)
        x = np.asarray(x, dtype=float)
        f = _fact_col(n, x.ndim)
        return tuple(unscale(c * f, e) for c, e in zip(coeffs, exps))

    def _trace_series(self, x, n):
        """Scaled series of aleph = g1 g2 + g3 g4 and the pieces of hbar at t = 0."""
        (c1, c2, c3, c4), (e1, e2, e3, e4) = self.taylor_scaled(x, n + 1)
        # both products carry the exponent e2 + e4
        e = e2 + e4
        aleph = _series_mul(c1, c2) + _series_mul(c3, c4)
        return (c1, c2, c3, c4), e, aleph[: n + 1]

    def aleph(self, x):
        """G(0, x) = g1 g2 + g3 g4."""
        _, e, al = self._trace_series(x, 0)
        return unscale(al[0], e)

    def hbar(self, x):
        """g1' g2' + g3' g4'."""
        (c1, c2, c3, c4), e, _ = self._trace_series(x, 0)
        return unscale(c1[1] * c2[1] + c3[1] * c4[1], e)

    def wronskian_defects(self, x):
        """Relative defects of g1 g3' - g1' g3 = 1 and g2 g4' - g2' g4 = -1 at ``x``."""
        (c1, c2, c3, c4), (e1, e2, e3, e4) = self.taylor_scaled(x, 1)
        out = []
        for (ca, ea), (cb, eb), target in (((c1, e1), (c3, e3), 1.0), ((c2, e2), (c4, e4), -1.0)):
            e = (ea + eb).astype(np.int64)
            t = np.ldexp(target, np.clip(-e, -1100, 1100).astype(np.int32))
            num = ca[0] * cb[1] - ca[1] * cb[0] - t
            den = np.maximum(np.abs(ca[0] * cb[1]) + np.abs(ca[1] * cb[0]), np.abs(t))
            out.append(num / den)
        return tuple(out)


def build_quartet(d: InitialData, L: float, tol: float = 1e-10, fixed_step=None) -> Quartet:
    """Integrate g2, g4 under the potential u on [-L, L] and wrap the quartet."""
    if not L >= 1:
        raise ValueError("working radius L must be at least 1")
    pots = compute_potentials(d)
    g2 = integrate_fundamental(pots.u, 0.0, 1.0, L, tol, fixed_step=fixed_step)
    g4 = integrate_fundamental(pots.u, 1.0, 0.0, L, tol, fixed_step=fixed_step)
    prefactor = Const(4 / d.m) * Func("exp", Const(Fraction(-1, 2)) * d.f1)
    shear = Const(Fraction(1, 4)) * (differentiate(d.f1) - d.f2)
    return Quartet(d, pots, g2, g4, float(L), float(tol), prefactor, shear)


def _binomial_table(n):
    return [[math.comb(p, i) for i in range(p + 1)] for p in range(n + 1)]


def _characteristic_to_bivariate(c, sign, N):
    """Coefficients in (dt, dx) of sum_p c[p] (dx + sign*dt)^p, total degree <= N."""
    out = np.zeros((N + 1, N + 1) + c.shape[1:])
    binom = _binomial_table(N)
    for p in range(N + 1):
        for i in range(p + 1):
            out[i, p - i] = c[p] * (binom[p][i] * (sign**i))
    return out


def _bivariate_mul(a, b, N):
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for i in range(N + 1):
        for j in range(N + 1 - i):
            acc = 0.0
            for p in range(i + 1):
                for q in range(j + 1):
                    acc = acc + a[p, q] * b[i - p, j - q]
            out[i, j] = acc
    return out


def _bivariate_log(G, N):
    """Taylor coefficients of log(G) minus its constant term.

    Solves G * d(log G) = dG degree by degree: the t-derivative identity for
    coefficients with a t-power, the x-derivative identity on the pure-x row.
    """
    L = np.zeros_like(G)
    c00 = G[0, 0]
    for total in range(1, N + 1):
        for i in range(total + 1):
            j = total - i
            if i >= 1:
                s = i * G[i, j]
                for a in range(1, i + 1):
                    for b in range(j + 1):
                        if a == i and b == j:
                            continue
                        s = s - a * L[a, b] * G[i - a, j - b]
                L[i, j] = s / (i * c00)
            else:
                s = j * G[0, j]
                for b in range(1, j):
                    s = s - b * L[0, b] * G[0, j - b]
                L[0, j] = s / (j * c00)
    return L


@dataclass(frozen=True, eq=False)
class SolutionField:
    """The assembled solution F on |x +- t| <= ``radius``."""

    quartet: Quartet
    m: float
    radius: float

    def _check(self, t, x):
        slack = 1e-12 * max(1.0, self.radius)
        if np.any(np.abs(x + t) > self.radius + slack) or np.any(np.abs(x - t) > self.radius + slack):
            raise ValueError(
                f"point outside the working domain |x +- t| <= {self.radius}"
            )

    def G_taylor(self, t, x, N):
        """Scaled bivariate Taylor coefficients of G in (dt, dx) through total degree ``N``.

        Returns ``(coeffs, exponent)`` with ``coeffs`` of shape ``(N+1, N+1, *shape)``.
        """
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        self._check(t, x)
        xi, eta = x + t, x - t
        (a1, _, a3, _), (e1, _, e3, _) = self._series_unique(xi, N)
        (_, b2, _, b4), (_, e2, _, e4) = self._series_unique(eta, N)
        P1 = _characteristic_to_bivariate(a1, +1, N)
        P3 = _characteristic_to_bivariate(a3, +1, N)
        Q2 = _characteristic_to_bivariate(b2, -1, N)
        Q4 = _characteristic_to_bivariate(b4, -1, N)
        return align_sum(_bivariate_mul(P1, Q2, N), e1 + e2, _bivariate_mul(P3, Q4, N), e3 + e4)

    def _series_unique(self, z, N):
        # grids repeat characteristic coordinates heavily; evaluate each once
        if z.size < 64:
            return self.quartet.taylor_scaled(z, N)
        zu, inv = np.unique(z.ravel(), return_inverse=True)
        coeffs, exps = self.quartet.taylor_scaled(zu, N)
        shape = z.shape
        return (
            tuple(c[:, inv].reshape((N + 1,) + shape) for c in coeffs),
            tuple(e[inv].reshape(shape) for e in exps),
        )

    def G_scaled(self, t, x):
        """``(mantissa, exponent)`` of G at the points."""
        c, e = self.G_taylor(t, x, 0)
        return c[0, 0], e

    def log_abs_G(self, t, x):
        m, e = self.G_scaled(t, x)
        return np.log(np.abs(m)) + e * LOG2

    def taylor(self, t, x, N):
        """Bivariate Taylor coefficients of F in (dt, dx) through total degree ``N``."""
        if N > MAX_PARTIAL_ORDER:
            raise ValueError(f"derivative order {N} exceeds the cap {MAX_PARTIAL_ORDER}")
        G, e = self.G_taylor(t, x, N)
        L = _bivariate_log(G, N)
        F = -2.0 * L
        F[0, 0] = -2.0 * (np.log(np.abs(G[0, 0])) + e * LOG2) - 2.0 * math.log(self.m / 4.0)
        return F

    def evaluate(self, t, x):
        out = self.taylor(t, x, 0)[0, 0]
        return float(out) if out.ndim == 0 else out

    __call__ = evaluate

    def partial(self, t, x, beta):
        """``d_t^b1 d_x^b2 F`` at the points."""
        b1, b2 = beta
        if b1 < 0 or b2 < 0:
            raise ValueError("multi-index entries must be nonnegative")
        N = b1 + b2
        out = self.taylor(t, x, N)[b1, b2] * (math.factorial(b1) * math.factorial(b2))
        return float(out) if out.ndim == 0 else out

    def residual(self, t, x):
        """(d_t^2 - d_x^2) F + (m^2/2) exp(F)."""
        F = self.taylor(t, x, 2)
        out = 2.0 * F[2, 0] - 2.0 * F[0, 2] + 0.5 * self.m**2 * np.exp(F[0, 0])
        return float(out) if out.ndim == 0 else out

    def H_log(self, t, x):
        """log of H = (m^2/16) G^2; H > 0 wherever this is finite."""
        return 2.0 * self.log_abs_G(t, x) + 2.0 * math.log(self.m / 4.0)


def solve(d: InitialData, alpha: float = 2, T: float | None = None, tol: float = 1e-10,
          fixed_step=None) -> SolutionField:
    """The solution of the Cauchy problem on the box |t| <= T, |x| <= alpha.

    The ODEs are integrated on [-L, L] with L = alpha + T + 1 so that both
    characteristic arguments x +- t stay inside. ``T`` defaults to ``alpha``.
    """
    if T is None:
        T = alpha
    L = alpha + T + 1
    q = build_quartet(d, L, tol, fixed_step=fixed_step)
    return SolutionField(q, d.m, float(L))


def evaluate_solution(s: SolutionField, t, x):
    return s.evaluate(t, x)


def solution_partial_jet(s: SolutionField, t, x, beta):
    return s.partial(t, x, beta)


def residual(s, t, x):
    """PDE residual of ``s`` at the points.

    ``s`` is a SolutionField or any object with ``partial(t, x, beta)`` and
    attribute ``m``.
    """
    if isinstance(s, SolutionField):
        return s.residual(t, x)
    Ftt = s.partial(t, x, (2, 0))
    Fxx = s.partial(t, x, (0, 2))
    F = s.partial(t, x, (0, 0))
    return Ftt - Fxx + 0.5 * s.m**2 * np.exp(F)


def restrict_initial(s, xs):
    """Cauchy data of a field: ``(F(0, x_i), d_t F(0, x_i))``.

    Works for any object with a vectorized ``partial(t, x, beta)``.
    """
    xs = np.asarray(xs, dtype=float)
    t0 = np.zeros_like(xs)
    return (
        np.asarray(s.partial(t0, xs, (0, 0)), dtype=float),
        np.asarray(s.partial(t0, xs, (1, 0)), dtype=float),
    )


@dataclass(frozen=True)
class DiagnosticEntry:
    name: str
    max_defect: float
    argmax_point: float


@dataclass(frozen=True)
class DiagnosticReport:
    """Max defect per identity over the sample points, plus the raw traces."""

    entries: tuple
    x: np.ndarray
    aleph: np.ndarray
    hbar_over_aleph: np.ndarray
    F_tt0: np.ndarray

    def __getitem__(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def max_defect(self):
        return max(e.max_defect for e in self.entries)

    def to_dict(self):
        return [
            {"name": e.name, "max_defect": e.max_defect, "argmax_point": e.argmax_point}
            for e in self.entries
        ]

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def diagnostics(d: InitialData, q: Quartet, xs) -> DiagnosticReport:
    """Check the t = 0 identities tying the quartet to the data.

    D1  aleph = (4/m) exp(-f1/2)                       (relative defect)
    D2  -g1' g2 - g3' g4 = (f1' + f2) aleph / 4
    D3  g1 g2' + g3 g4' = -(f1' - f2) aleph / 4
    D4  hbar/aleph = [(f1')^2 - f2^2 - m^2 exp(f1)] / 16
    D5  d_t^2 F(0, .) = f2^2/2 + 4 hbar/aleph - 2 (u + w)
    D6  f1'' = 2 (aleph'/aleph)^2 - 2 aleph''/aleph

    with hbar = g1' g2' + g3' g4'. D2-D6 report absolute defects.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    m = d.m
    (c1, c2, c3, c4), e, al = q._trace_series(xs, 2)
    scale = np.ldexp(1.0, e.astype(np.int32))
    aleph = al[0] * scale
    aleph_p = al[1] * scale
    aleph_pp = 2.0 * al[2] * scale
    hbar = (c1[1] * c2[1] + c3[1] * c4[1]) * scale
    lhs2 = -(c1[1] * c2[0] + c3[1] * c4[0]) * scale
    lhs3 = (c1[0] * c2[1] + c3[0] * c4[1]) * scale

    f1 = taylor(d.f1, xs, 2)
    f2 = taylor(d.f2, xs, 0)[0]
    df1, ddf1 = f1[1], 2.0 * f1[2]
    u = evaluate(q.potentials.u, xs)
    w = evaluate(q.potentials.w, xs)
    target = (4.0 / m) * np.exp(-0.5 * f1[0])

    field_ = SolutionField(q, m, q.L)
    Ftt = field_.partial(np.zeros_like(xs), xs, (2, 0))

    defects = {
        "D1": np.abs(aleph - target) / np.abs(target),
        "D2": np.abs(lhs2 - 0.25 * (df1 + f2) * aleph),
        "D3": np.abs(lhs3 + 0.25 * (df1 - f2) * aleph),
        "D4": np.abs(hbar / aleph - (df1**2 - f2**2 - m**2 * np.exp(f1[0])) / 16.0),
        "D5": np.abs(Ftt - (0.5 * f2**2 + 4.0 * hbar / aleph - 2.0 * (u + w))),
        "D6": np.abs(ddf1 - (2.0 * (aleph_p / aleph) ** 2 - 2.0 * aleph_pp / aleph)),
    }
    entries = []
    for name, v in defects.items():
        i = int(np.argmax(v))
        entries.append(DiagnosticEntry(name, float(v[i]), float(xs[i])))
    return DiagnosticReport(tuple(entries), xs, aleph, hbar / aleph, np.asarray(Ftt))
