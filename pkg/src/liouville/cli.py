"""Command-line front end: ``liouville {solve,verify,roundtrip,converge,fdb,oracle}``.

Fields and tables go to CSV, verdicts to JSON with the keys ``command``,
``config_echo``, ``metrics`` and ``pass``. Exit status is 0 when every check
of the invoked suite passes, 1 when one fails, 2 on configuration or
expression errors (messages on stderr).
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import faa_di_bruno as fdb
from .fd_oracle import FDError, compare_and_order, fd_solve_both
from .ode import IntegrationError
from .reports import make_report, write_field_csv, write_report
from .seminorms import GridSpec, SeminormIndex, convergence_study
from .smooth import DomainError, ExpressionSyntaxError, UnknownIdentifierError, as_expr, evaluate, parse_expression
from .solution import InitialData, diagnostics, restrict_initial, solve

__all__ = ["RunConfig", "ConfigError", "TOLERANCES", "run_command", "main"]

COMMANDS = ("solve", "verify", "roundtrip", "converge", "fdb", "oracle")

# documented pass thresholds per check
TOLERANCES = {
    "residual_sup": 1e-6,
    "wronskian": 1e-8,
    "aleph_rel": 1e-8,
    "diagnostics": 1e-8,
    "roundtrip": 1e-7,
    "converge_ratio": 1e-3,
    "order_low": 1.7,
    "order_high": 2.2,
    "oracle_sup": 5e-3,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    f1: str = "0"
    f2: str = "0"
    m: float = 2.0
    alpha: int = 2
    tmax: float | None = None
    grid: int = 50
    tol: float = 1e-10
    jet_order: int = 0
    out: str | None = None
    format: str = "json"
    # command specific
    dump_ode: str | None = None
    members: int = 10
    base_f1: str = "0"
    base_f2: str = "0"
    max_order: int = 6
    max_mixed: int = 5
    steps: tuple = (0.02, 0.01, 0.005)
    lam: float = 0.5

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("f1", "f2", "base_f1", "base_f2"):
            try:
                parse_expression(getattr(self, name))
            except (ExpressionSyntaxError, UnknownIdentifierError) as exc:
                raise ConfigError(f"--{name.replace('_', '-')}: {exc}") from None
        if not (math.isfinite(self.m) and self.m > 0):
            raise ConfigError("-m must be a positive real")
        if self.alpha < 1:
            raise ConfigError("--alpha must be a positive integer")
        if self.tmax is not None and not (math.isfinite(self.tmax) and self.tmax > 0):
            raise ConfigError("--tmax must be a positive real")
        if self.grid < 1:
            raise ConfigError("--grid must be a positive integer")
        if not (0 < self.tol <= 1e-4):
            raise ConfigError("--tol must lie in (0, 1e-4]")
        if self.jet_order < 0:
            raise ConfigError("--jet-order must be nonnegative")
        if self.format not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")
        if self.members < 1 or self.max_order < 1 or self.max_mixed < 2:
            raise ConfigError("member and order counts must be positive")
        if not all(h > 0 for h in self.steps) or not (0 < self.lam <= 1):
            raise ConfigError("steps must be positive and 0 < lam <= 1")

    @property
    def T(self):
        return float(self.alpha) if self.tmax is None else float(self.tmax)

    def data(self):
        return InitialData(self.f1, self.f2, self.m)


def _box(cfg):
    """Grid on [-T, T] x [-alpha, alpha] with ``grid`` points per unit."""
    nt = max(1, round(2 * cfg.T * cfg.grid))
    nx = 2 * cfg.alpha * cfg.grid
    t = np.linspace(-cfg.T, cfg.T, nt + 1)
    x = np.linspace(-cfg.alpha, cfg.alpha, nx + 1)
    return np.meshgrid(t, x, indexing="ij")


def _cmd_solve(cfg):
    d = cfg.data()
    F = solve(d, alpha=cfg.alpha, T=cfg.T, tol=cfg.tol)
    if cfg.dump_ode:
        F.quartet.g2.dump_csv(cfg.dump_ode + "_g2.csv")
        F.quartet.g4.dump_csv(cfg.dump_ode + "_g4.csv")
    T, Xg = _box(cfg)
    N = cfg.jet_order
    tab = F.taylor(T, Xg, N)
    partials = {}
    for n in range(1, N + 1):
        for b1 in range(n, -1, -1):
            partials[(b1, n - b1)] = tab[b1, n - b1] * (math.factorial(b1) * math.factorial(n - b1))
    values = tab[0, 0]
    finite = bool(np.all(np.isfinite(values)))
    if cfg.format == "csv":
        write_field_csv(cfg.out or sys.stdout, T, Xg, values, partials)
        return finite, None
    metrics = {
        "points": int(values.size),
        "F_min": float(np.min(values)),
        "F_max": float(np.max(values)),
        "ode_nodes": [F.quartet.g2.n_nodes, F.quartet.g4.n_nodes],
    }
    return finite, metrics


def _cmd_verify(cfg):
    d = cfg.data()
    F = solve(d, alpha=cfg.alpha, T=cfg.T, tol=cfg.tol)
    q = F.quartet
    T, Xg = _box(cfg)
    res = float(np.max(np.abs(F.residual(T, Xg))))
    xs = np.linspace(-F.radius, F.radius, 8 * cfg.grid * int(math.ceil(F.radius)) + 1)
    w13, w24 = (float(np.max(np.abs(v))) for v in q.wronskian_defects(xs))
    logH = F.H_log(T, Xg)
    pos = bool(np.all(np.isfinite(logH)))
    xd = np.linspace(-cfg.alpha, cfg.alpha, 100)
    target = (4.0 / d.m) * np.exp(-0.5 * np.asarray(evaluate(d.f1, xd), dtype=float) * np.ones_like(xd))
    aleph_rel = float(np.max(np.abs(q.aleph(xd) - target) / np.abs(target)))
    rep = diagnostics(d, q, xd)
    diag = {e.name: e.max_defect for e in rep.entries}
    metrics = {
        "residual_sup": res,
        "wronskian_defect_13": w13,
        "wronskian_defect_24": w24,
        "positivity_log_H_min": float(np.min(logH)),
        "positivity": pos,
        "aleph_rel_error": aleph_rel,
        "diagnostics": diag,
    }
    ok = (
        res <= TOLERANCES["residual_sup"]
        and max(w13, w24) <= TOLERANCES["wronskian"]
        and pos
        and aleph_rel <= TOLERANCES["aleph_rel"]
        and rep.max_defect <= TOLERANCES["diagnostics"]
    )
    return ok, metrics


def _cmd_roundtrip(cfg):
    d = cfg.data()
    F = solve(d, alpha=cfg.alpha, T=cfg.T, tol=cfg.tol)
    xs = np.linspace(-cfg.alpha, cfg.alpha, 121)
    F0, Ft0 = restrict_initial(F, xs)
    e1 = float(np.max(np.abs(F0 - evaluate(d.f1, xs))))
    e2 = float(np.max(np.abs(Ft0 - evaluate(d.f2, xs))))
    return max(e1, e2) <= TOLERANCES["roundtrip"], {"f1_error": e1, "f2_error": e2, "points": 121}


def _cmd_converge(cfg):
    base = InitialData(cfg.base_f1, cfg.base_f2, cfg.m)
    df1, df2 = as_expr(cfg.f1), as_expr(cfg.f2)
    family = [
        InitialData(base.f1 + df1 * 2.0**-n, base.f2 + df2 * 2.0**-n, cfg.m) for n in range(cfg.members + 1)
    ]
    order = cfg.jet_order or 3
    indices = [
        SeminormIndex(a, (b1, n - b1))
        for a in range(1, cfg.alpha + 1)
        for n in range(order + 1)
        for b1 in range(n, -1, -1)
    ]
    table = convergence_study(family, base, indices, GridSpec(cfg.grid), tol=cfg.tol)
    if cfg.format == "csv":
        table.to_csv(cfg.out or sys.stdout)
    columns = []
    ok = True
    for idx in table.indices():
        col = [r["output_dist"] for r in sorted(table.column(idx), key=lambda r: r["n"])]
        mono = table.monotone(idx)
        ratio = col[-1] / col[0] if col[0] else math.nan
        good = mono and ratio <= TOLERANCES["converge_ratio"]
        ok &= good
        columns.append({"alpha": idx.alpha, "beta": list(idx.beta), "monotone": mono, "last_over_first": ratio, "pass": good})
    return ok, (None if cfg.format == "csv" else {"columns": columns, "rows": table.rows})


def _cmd_fdb(cfg):
    rows = fdb.verify_formulas(cfg.max_order, cfg.max_mixed)
    ok = all(r.passed for r in rows)
    if cfg.format == "csv" or not cfg.out:
        print(fdb.format_check_table(rows))
    deviating = {}
    for r in rows:
        if not r.passed:
            deviating.setdefault(r.formula, []).append(list(r.order))
    metrics = {
        "rows": [{"formula": r.formula, "order": list(r.order), "pass": r.passed, "error": r.error, "note": r.note} for r in rows],
        "deviating_orders": deviating,
    }
    return ok, metrics


def _cmd_oracle(cfg):
    d = cfg.data()
    F = solve(d, alpha=cfg.alpha, T=cfg.T, tol=cfg.tol)
    runs = [fd_solve_both(d, cfg.alpha, cfg.T, h, cfg.lam) for h in cfg.steps]
    rep = compare_and_order(F, runs, cfg.alpha, cfg.T)
    if cfg.out and cfg.format == "csv":
        runs[-1].dump_csv(cfg.out)
    lo, hi = TOLERANCES["order_low"], TOLERANCES["order_high"]
    ok = all(lo <= o <= hi for o in rep.order_sup) and rep.runs[-1].sup <= TOLERANCES["oracle_sup"]
    return ok, rep.to_dict()


_HANDLERS = {
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "roundtrip": _cmd_roundtrip,
    "converge": _cmd_converge,
    "fdb": _cmd_fdb,
    "oracle": _cmd_oracle,
}


def run_command(cfg: RunConfig):
    """Run one command; returns ``(exit_status, report_or_None)``.

    A report is produced (and written to ``cfg.out`` or stdout) whenever the
    output format is JSON.
    """
    try:
        ok, metrics = _HANDLERS[cfg.command](cfg)
    except (DomainError, IntegrationError, FDError, OverflowError) as exc:
        print(f"liouville {cfg.command}: computation failed: {exc}", file=sys.stderr)
        return 1, None
    report = None
    if metrics is not None:
        echo = {k: v for k, v in asdict(cfg).items()}
        report = make_report(cfg.command, echo, metrics, ok)
        text = write_report(report, cfg.out)
        if not cfg.out:
            print(text)
    return (0 if ok else 1), report


def _floats(text):
    return tuple(float(v) for v in text.split(","))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--f1", default="0", help="initial value F(0, x) as an expression in x")
    common.add_argument("--f2", default="0", help="initial velocity d_t F(0, x)")
    common.add_argument("-m", type=float, default=2.0, help="mass parameter m > 0")
    common.add_argument("--alpha", type=int, default=2, help="spatial half-width of the box")
    common.add_argument("--tmax", type=float, default=None, help="time half-width (default: alpha)")
    common.add_argument("--grid", type=int, default=50, help="grid points per unit length")
    common.add_argument("--tol", type=float, default=1e-10, help="ODE tolerance")
    common.add_argument("--jet-order", type=int, default=0, help="derivative order of dumped/studied partials")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)

    p = argparse.ArgumentParser(prog="liouville", description="Exact Liouville-equation solutions from Cauchy data.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", parents=[common], help="dump the field F on the box")
    s.add_argument("--dump-ode", default=None, metavar="PREFIX", help="write ODE trajectories to PREFIX_g2.csv, PREFIX_g4.csv")
    sub.add_parser("verify", parents=[common], help="residual, Wronskian, positivity and diagnostic checks")
    sub.add_parser("roundtrip", parents=[common], help="recover the Cauchy data from the solution")
    c = sub.add_parser("converge", parents=[common], help="continuity experiment for base + 2^-n (f1, f2)")
    c.add_argument("--members", type=int, default=10)
    c.add_argument("--base-f1", default="0")
    c.add_argument("--base-f2", default="0")
    f = sub.add_parser("fdb", parents=[common], help="partition formula checks")
    f.add_argument("action", choices=("verify",))
    f.add_argument("--max-order", type=int, default=6)
    f.add_argument("--max-mixed", type=int, default=5)
    o = sub.add_parser("oracle", parents=[common], help="finite-difference cross-check")
    o.add_argument("--steps", type=_floats, default=(0.02, 0.01, 0.005), help="comma-separated spatial steps")
    o.add_argument("--lam", type=float, default=0.5, help="Courant ratio")
    return p


_CSV_DEFAULT = {"solve", "converge"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kw = vars(args).copy()
    kw.pop("action", None)
    if kw["format"] is None:
        kw["format"] = "csv" if args.command in _CSV_DEFAULT else "json"
    try:
        cfg = RunConfig(**kw)
    except (ConfigError, TypeError) as exc:
        print(f"liouville {args.command}: {exc}", file=sys.stderr)
        return 2
    status, _ = run_command(cfg)
    return status


if __name__ == "__main__":
    sys.exit(main())
