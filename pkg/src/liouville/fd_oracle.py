"""Explicit finite differences for the Liouville equation, as an independent check.

The scheme is the standard three-level central difference

    F[n+1, j] = 2 F[n, j] - F[n-1, j] + lam^2 (F[n, j+1] - 2 F[n, j] + F[n, j-1])
                - k^2 (m^2/2) exp(F[n, j])

with k = lam * h, started by the Taylor layer

    F[1, j] = f1 + k f2 + (k^2/2) (f1'' - (m^2/2) exp(f1)).

No boundary conditions are imposed: each step drops one cell at both ends,
so every retained value depends only on data inside its domain of dependence.
Times are nonnegative; the past is reached by running the same scheme on
the reflected data (f1, -f2) and mirroring, see ``fd_solve_both``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .reports import write_field_csv
from .smooth import differentiate, evaluate
from .solution import InitialData

__all__ = [
    "FDError",
    "GridField",
    "fd_solve",
    "fd_solve_both",
    "RunComparison",
    "OracleReport",
    "compare_and_order",
]

BLOWUP = 700.0


class FDError(ArithmeticError):
    """Data evaluation failure or blow-up in the finite-difference run."""


@dataclass(frozen=True)
class GridField:
    """Values ``values[n, j]`` at ``(t[n], x[j])``; NaN outside the light cone."""

    h: float
    k: float
    t: np.ndarray
    x: np.ndarray
    values: np.ndarray
    m: float

    @property
    def lam(self):
        return self.k / self.h

    @property
    def x_extent(self):
        return float(np.max(np.abs(self.x[np.isfinite(self.values[-1])])))

    def layer(self, n):
        return self.values[n]

    def sample(self, t, x):
        """Values at grid points given by coordinates (must lie on the grid)."""
        n = np.rint((np.asarray(t) - self.t[0]) / self.k).astype(int)
        j = np.rint((np.asarray(x) - self.x[0]) / self.h).astype(int)
        if np.any(n < 0) or np.any(n >= self.t.size) or np.any(j < 0) or np.any(j >= self.x.size):
            raise ValueError("sample points outside the grid")
        if not (np.allclose(self.t[n], t, atol=1e-9 * self.k) and np.allclose(self.x[j], x, atol=1e-9 * self.h)):
            raise ValueError("sample points are not grid points")
        return self.values[n, j]

    def dump_csv(self, path):
        T, X = np.meshgrid(self.t, self.x, indexing="ij")
        write_field_csv(path, T, X, self.values)


def _steps(extent, step, what):
    n = round(extent / step)
    if n < 1 or abs(n * step - extent) > 1e-9 * max(1.0, extent):
        raise ValueError(f"{what} extent {extent} is not a positive multiple of the step {step}")
    return n


def _sample(expr, x, what):
    try:
        with np.errstate(all="raise"):
            v = np.asarray(evaluate(expr, x), dtype=float) * np.ones_like(x)
    except (ArithmeticError, FloatingPointError, ValueError) as exc:
        raise FDError(f"cannot evaluate {what} on the dependence domain: {exc}") from exc
    if not np.all(np.isfinite(v)):
        raise FDError(f"{what} is not finite on the dependence domain")
    return v


def fd_solve(d: InitialData, x_extent: float, t_extent: float, h: float, lam: float = 0.5,
             backward: bool = False) -> GridField:
    """Run the scheme up to ``t_extent`` and keep ``|x| <= x_extent`` at the last layer.

    ``x_extent`` and ``t_extent`` must be multiples of ``h`` and ``k = lam h``.
    With ``backward=True`` the run covers ``[-t_extent, 0]`` (times stored
    in decreasing order from 0).
    """
    if not (h > 0 and math.isfinite(h)):
        raise ValueError("spatial step must be positive")
    if not (0 < lam <= 1):
        raise ValueError(f"Courant ratio {lam} violates the CFL condition 0 < lam <= 1")
    k = lam * h
    N = _steps(t_extent, k, "time")
    M = _steps(x_extent, h, "space")
    J = M + N
    x = np.arange(-J, J + 1) * h
    m2 = 0.5 * d.m**2
    f2 = -d.f2 if backward else d.f2

    f1v = _sample(d.f1, x, "f1")
    f2v = _sample(f2, x, "f2")
    f1pp = _sample(differentiate(d.f1, 2), x, "f1''")

    vals = np.full((N + 1, x.size), np.nan)
    vals[0] = f1v
    vals[1] = f1v + k * f2v + 0.5 * k * k * (f1pp - m2 * np.exp(f1v))
    lam2, kk = lam * lam, k * k
    for n in range(1, N):
        # layer n is valid on j in [n-1, size-n]; layer n+1 loses one more cell
        lo, hi = n, x.size - n
        c = vals[n, lo:hi]
        vals[n + 1, lo:hi] = (
            2.0 * c - vals[n - 1, lo:hi]
            + lam2 * (vals[n, lo + 1:hi + 1] - 2.0 * c + vals[n, lo - 1:hi - 1])
            - kk * m2 * np.exp(c)
        )
        if np.max(np.abs(vals[n + 1, lo:hi])) > BLOWUP:
            raise FDError(f"|F| exceeds {BLOWUP} at t = {(n + 1) * k:g}")
    t = np.arange(N + 1) * k
    return GridField(h, k, -t if backward else t, x, vals, d.m)


def fd_solve_both(d: InitialData, x_extent: float, t_extent: float, h: float, lam: float = 0.5) -> GridField:
    """Forward and backward runs joined into one field on ``[-t_extent, t_extent]``."""
    fwd = fd_solve(d, x_extent, t_extent, h, lam)
    bwd = fd_solve(d, x_extent, t_extent, h, lam, backward=True)
    t = np.concatenate([bwd.t[:0:-1], fwd.t])
    vals = np.concatenate([bwd.values[:0:-1], fwd.values])
    return GridField(h, fwd.k, t, fwd.x, vals, d.m)


@dataclass(frozen=True)
class RunComparison:
    h: float
    sup: float
    l2: float
    points: int


@dataclass(frozen=True)
class OracleReport:
    runs: tuple
    order_sup: tuple
    order_l2: tuple

    def to_dict(self):
        return {
            "runs": [{"h": r.h, "sup": r.sup, "l2": r.l2, "points": r.points} for r in self.runs],
            "order_sup": list(self.order_sup),
            "order_l2": list(self.order_l2),
        }


def _order(a, b):
    if a == 0 or b == 0:
        return math.nan
    return math.log2(a / b)


def compare_and_order(exact, runs, x_window: float | None = None, t_window: float | None = None) -> OracleReport:
    """Discrepancies of each run against ``exact`` on the coarsest run's grid points.

    ``exact`` is anything callable as ``exact(t, x)`` on arrays (a
    SolutionField, or another GridField through its ``sample``). The runs
    must share the Courant ratio and their steps must divide the coarsest
    one, so the coarsest grid is contained in all others; points outside
    any run's light cone are dropped. The L2 discrepancy is the
    discrete norm ``sqrt(sum e^2 h k)`` over those points.
    """
    runs = sorted(runs, key=lambda r: -r.h)
    if not runs:
        raise ValueError("no runs to compare")
    c = runs[0]
    for r in runs[1:]:
        ratio = c.h / r.h
        if abs(ratio - round(ratio)) > 1e-9 or not math.isclose(r.lam, c.lam, rel_tol=1e-12):
            raise ValueError("grid mismatch: steps must nest with a common Courant ratio")
    T, X = np.meshgrid(c.t, c.x, indexing="ij")
    mask = np.isfinite(c.values)
    if x_window is not None:
        mask &= np.abs(X) <= x_window + 1e-9 * c.h
    if t_window is not None:
        mask &= np.abs(T) <= t_window + 1e-9 * c.k
    # finer light cones are narrower by half a coarse cell: keep points all runs cover
    vals = []
    for r in runs:
        v = np.full(T.shape, np.nan)
        v[mask] = r.sample(T[mask], X[mask])
        vals.append(v)
        mask &= np.isfinite(v)
    Tp, Xp = T[mask], X[mask]
    if Tp.size == 0:
        raise ValueError("grid mismatch: no common points")
    ref = exact.sample(Tp, Xp) if isinstance(exact, GridField) else np.asarray(exact(Tp, Xp), dtype=float)
    out = []
    for r, v in zip(runs, vals):
        e = v[mask] - ref
        out.append(RunComparison(r.h, float(np.max(np.abs(e))), float(math.sqrt(np.sum(e * e) * c.h * c.k)), int(e.size)))
    osup = tuple(_order(a.sup, b.sup) for a, b in zip(out, out[1:]))
    ol2 = tuple(_order(a.l2, b.l2) for a, b in zip(out, out[1:]))
    return OracleReport(tuple(out), osup, ol2)
