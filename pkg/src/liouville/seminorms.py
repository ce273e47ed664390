"""Seminorms of the smooth topology and the continuity experiment.

For a compact K_alpha = [-alpha, alpha] and a derivative multi-index beta,

    p_{alpha,beta}(f) = sup_{K_alpha}   |f^(beta)|          (f: R -> R)
    r_{alpha,beta}(P) = sup_{K_alpha}   ||P^(beta)||_2      (P: R -> R^2)
    q_{alpha,beta}(F) = sup_{K_alpha^2} |d_t^b1 d_x^b2 F|   (F: R^2 -> R)

The sup is approximated by the max over a uniform grid with a fixed number of
points per unit length; grids for nested compacts and for doubled densities
contain the coarser grid, so the reported values are monotone in both.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .reports import open_output
from .smooth import Expr, jet
from .solution import InitialData, solve

__all__ = [
    "SeminormIndex",
    "GridSpec",
    "seminorm_1d",
    "seminorm_vector",
    "seminorm_2d",
    "FieldDifference",
    "ConvergenceTable",
    "convergence_study",
]


@dataclass(frozen=True)
class SeminormIndex:
    """Compact radius ``alpha >= 1`` and derivative multi-index ``beta``."""

    alpha: int
    beta: tuple

    def __post_init__(self):
        beta = (self.beta,) if isinstance(self.beta, (int, np.integer)) else tuple(self.beta)
        object.__setattr__(self, "beta", tuple(int(b) for b in beta))
        if int(self.alpha) != self.alpha or self.alpha < 1:
            raise ValueError("alpha must be a positive integer")
        if any(b < 0 for b in self.beta):
            raise ValueError("multi-index entries must be nonnegative")
        if len(self.beta) not in (1, 2):
            raise ValueError("multi-index must have length 1 or 2")

    @property
    def order(self):
        return sum(self.beta)


@dataclass(frozen=True)
class GridSpec:
    points_per_unit: int = 64

    def __post_init__(self):
        if self.points_per_unit < 1:
            raise ValueError("points per unit must be positive")

    def points(self, alpha):
        n = 2 * int(alpha) * self.points_per_unit
        # integer lattice / ppu keeps nested grids bit-identical
        return np.arange(-n // 2, n // 2 + 1) / self.points_per_unit


def _derivative_values(f, x, k):
    if isinstance(f, Expr):
        return jet(f, x, k).values[k]
    if hasattr(f, "derivative"):
        return f.derivative(x, k)
    if callable(f) and k == 0:
        return f(x)
    raise TypeError("need an expression or an object with derivative(x, k)")


def seminorm_1d(f, idx: SeminormIndex, grid: GridSpec = GridSpec()) -> float:
    """Grid max of ``|f^(beta)|`` on K_alpha (a lower bound of the sup)."""
    if len(idx.beta) != 1:
        raise ValueError("1-d seminorm needs a length-1 multi-index")
    x = grid.points(idx.alpha)
    return float(np.max(np.abs(_derivative_values(f, x, idx.beta[0]))))


def seminorm_vector(components, idx: SeminormIndex, grid: GridSpec = GridSpec()) -> float:
    """Grid max of the Euclidean norm of the componentwise beta-th derivative."""
    if len(idx.beta) != 1:
        raise ValueError("vector seminorm needs a length-1 multi-index")
    x = grid.points(idx.alpha)
    vals = [np.asarray(_derivative_values(c, x, idx.beta[0])) for c in components]
    return float(np.max(np.sqrt(sum(v * v for v in vals))))


def seminorm_2d(F, idx: SeminormIndex, grid: GridSpec = GridSpec()) -> float:
    """Grid max of ``|d_t^b1 d_x^b2 F|`` on K_alpha^2.

    ``F`` is any object with a vectorized ``partial(t, x, beta)``.
    """
    if len(idx.beta) != 2:
        raise ValueError("2-d seminorm needs a length-2 multi-index")
    p = grid.points(idx.alpha)
    T, X = np.meshgrid(p, p, indexing="ij")
    return float(np.max(np.abs(F.partial(T, X, idx.beta))))


@dataclass(frozen=True)
class FieldDifference:
    """Pointwise difference ``a - b`` of two fields, itself a field."""

    a: object
    b: object

    def partial(self, t, x, beta):
        return self.a.partial(t, x, beta) - self.b.partial(t, x, beta)


@dataclass
class ConvergenceTable:
    """Rows ``(n, alpha, beta, input_dist, output_dist)`` and per-column verdicts.

    A column is one seminorm index; its verdict says whether the output
    distance decreases strictly with n.
    """

    rows: list = field(default_factory=list)

    def column(self, idx: SeminormIndex):
        return [r for r in self.rows if r["alpha"] == idx.alpha and r["beta"] == idx.beta]

    def indices(self):
        seen = []
        for r in self.rows:
            key = SeminormIndex(r["alpha"], r["beta"])
            if key not in seen:
                seen.append(key)
        return seen

    def monotone(self, idx: SeminormIndex, strict=True) -> bool:
        vals = [r["output_dist"] for r in sorted(self.column(idx), key=lambda r: r["n"])]
        if strict:
            return all(b < a for a, b in zip(vals, vals[1:]))
        return all(b <= a for a, b in zip(vals, vals[1:]))

    def verdicts(self):
        return {idx: self.monotone(idx) for idx in self.indices()}

    def to_csv(self, path):
        two_d = any(len(r["beta"]) == 2 for r in self.rows)
        with open_output(path) as fh:
            w = csv.writer(fh)
            w.writerow(["n", "alpha", "beta1"] + (["beta2"] if two_d else []) + ["input_dist", "output_dist"])
            for r in self.rows:
                b = list(r["beta"]) + ([0] if two_d and len(r["beta"]) == 1 else [])
                w.writerow([r["n"], r["alpha"], *b, repr(r["input_dist"]), repr(r["output_dist"])])


def _threads():
    try:
        return max(1, int(os.environ.get("LIOUVILLE_THREADS", "1")))
    except ValueError:
        return 1


def convergence_study(family, target: InitialData, indices, grid: GridSpec = GridSpec(),
                      tol: float = 1e-10) -> ConvergenceTable:
    """Distances of solutions from a family of data to the target solution.

    For each member n and each 2-d index (alpha, beta) the table holds
    ``q_{alpha,beta}(F_n - F)`` and the matching input distance
    ``max(p_{alpha,|beta|}(f1_n - f1), p_{alpha,|beta|}(f2_n - f2))``.
    Fields must expose ``taylor(t, x, N)`` (as SolutionField does).
    """
    family = list(family)
    indices = [i if isinstance(i, SeminormIndex) else SeminormIndex(*i) for i in indices]
    if any(d.m != target.m for d in family):
        raise ValueError("all data must share the mass parameter")
    amax = max(i.alpha for i in indices)

    def build(d):
        return solve(d, alpha=amax, T=amax, tol=tol)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        F_target = build(target)
        fields = list(pool.map(build, family))

    # one Taylor table per field and compact instead of one sweep per index
    N = max(i.order for i in indices)
    alphas = sorted({i.alpha for i in indices})

    def tables(F):
        out = {}
        for a in alphas:
            p = grid.points(a)
            T, X = np.meshgrid(p, p, indexing="ij")
            out[a] = F.taylor(T, X, N)
        return out

    target_tabs = tables(F_target)
    table = ConvergenceTable()
    for n, (d, Fn) in enumerate(zip(family, fields)):
        tabs = tables(Fn)
        df1, df2 = d.f1 - target.f1, d.f2 - target.f2
        for idx in indices:
            k = SeminormIndex(idx.alpha, (idx.order,))
            inp = max(seminorm_1d(df1, k, grid), seminorm_1d(df2, k, grid))
            b1, b2 = idx.beta
            diff = tabs[idx.alpha][b1, b2] - target_tabs[idx.alpha][b1, b2]
            out = float(np.max(np.abs(diff))) * math.factorial(b1) * math.factorial(b2)
            table.rows.append(
                {"n": n, "alpha": idx.alpha, "beta": idx.beta, "input_dist": inp, "output_dist": out}
            )
    return table
