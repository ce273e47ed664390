"""Plain-file outputs shared by the solver, the finite-difference oracle and the CLI.

Field dumps are CSV with header ``t,x,F`` followed by optional derivative
columns (``dF_dt``, ``dF_dx``, ``d2F_dt2``, ...); reports are JSON objects
with the fixed keys ``command``, ``config_echo``, ``metrics`` and ``pass``.
"""

from __future__ import annotations

import contextlib
import csv
import json
import math

import numpy as np

__all__ = ["open_output", "partial_column_name", "write_field_csv", "read_field_csv", "make_report", "write_report"]


def partial_column_name(beta):
    b1, b2 = beta
    n = b1 + b2
    if n == 0:
        return "F"
    parts = []
    for var, k in (("t", b1), ("x", b2)):
        if k:
            parts.append(f"d{var}" + (str(k) if k > 1 else ""))
    top = "d" + (str(n) if n > 1 else "")
    return f"{top}F_{''.join(parts)}"


def write_field_csv(path, t, x, F, partials=None):
    """Write points ``(t, x)`` with values ``F`` and optional ``{beta: values}``.

    Non-finite values (points outside a light cone) are skipped.
    """
    t, x, F = (np.ravel(np.asarray(a, dtype=float)) for a in np.broadcast_arrays(t, x, F))
    partials = partials or {}
    names = [partial_column_name(b) for b in partials]
    cols = [np.ravel(np.asarray(v, dtype=float)) for v in partials.values()]
    with open_output(path) as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "F", *names])
        for i in range(F.size):
            if not math.isfinite(F[i]):
                continue
            w.writerow([repr(float(t[i])), repr(float(x[i])), repr(float(F[i]))] + [repr(float(c[i])) for c in cols])


@contextlib.contextmanager
def open_output(path):
    # file objects (e.g. sys.stdout) are written to but not closed
    if hasattr(path, "write"):
        yield path
        return
    with open(path, "w", newline="") as fh:
        yield fh


def read_field_csv(path):
    """Columns of a field dump as a dict of float arrays."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) for v in row] for row in r]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def make_report(command, config_echo, metrics, passed):
    return {
        "command": command,
        "config_echo": _jsonable(config_echo),
        "metrics": _jsonable(metrics),
        "pass": bool(passed),
    }


def write_report(report, path=None):
    text = json.dumps(report, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
