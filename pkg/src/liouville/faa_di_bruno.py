"""Partition-indexed formulas for derivatives of exp(h) and log(1 + J).

Index sets
----------
R(beta)       a in N^beta,      sum_j j a_j = beta              (partitions of beta)
R(lam, mu)    a in N^(lam+1),   sum_{j>=1} j a_j = lam, sum_{j>=0} a_j = mu
T(lam, mu)    a in N^lam,       sum_j a_j = mu                  (weak compositions)

Coefficients
------------
P_beta(a)     beta! / prod_j (j!)^a_j a_j!
l_beta(a)     sum_j a_j
W_lam,mu(a)   mu!/a_0! * lam! / prod_{j>=1} (j!)^a_j a_j!   (``reading="factorial"``)
              mu!/a_0  * lam! / prod_{j>=1} (j!)^a_j a_j!   (``reading="literal"``,
              undefined when a_0 = 0)
N_lam,mu(a)   mu! / prod_j a_j!

All coefficient arithmetic is exact; jet values may be floats or Fractions,
and Fraction inputs give exact results for the 1-d formulas.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "MAX_PARTITION_ORDER",
    "MAX_ORDER_1D",
    "MAX_ORDER_MIXED",
    "CompositionSet",
    "enumerate_compositions",
    "composition_coefficient",
    "exp_derivative_factor",
    "exp_derivative",
    "log_derivative_1d",
    "log_derivative_mixed",
    "log_derivative_mixed_complete",
    "CheckRow",
    "verify_formulas",
    "format_check_table",
]

MAX_PARTITION_ORDER = 24
MAX_ORDER_1D = 12
MAX_ORDER_MIXED = 10


@dataclass(frozen=True)
class CompositionSet:
    kind: str
    params: tuple
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, a):
        return tuple(a) in self.elements


@lru_cache(maxsize=None)
def _partitions(beta):
    """Multiplicity vectors a (length beta) with sum j*a_j = beta."""
    out = []

    def rec(j, remaining, acc):
        # choose a_j for part size j, from the largest part down
        if j == 0:
            if remaining == 0:
                out.append(tuple(reversed(acc)))
            return
        for aj in range(remaining // j, -1, -1):
            rec(j - 1, remaining - aj * j, acc + [aj])

    rec(beta, beta, [])
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _weak_compositions(lam, mu):
    if lam == 0:
        return ((),) if mu == 0 else ()
    out = []
    for cut in itertools.combinations(range(mu + lam - 1), lam - 1):
        prev = -1
        parts = []
        for c in cut:
            parts.append(c - prev - 1)
            prev = c
        parts.append(mu + lam - 1 - prev - 1)
        out.append(tuple(parts))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _r_lam_mu(lam, mu):
    if lam == 0:
        return ((mu,),)
    out = []
    for a in _partitions(lam):
        l = sum(a)
        if l <= mu:
            out.append((mu - l,) + a)
    return tuple(sorted(out))


def enumerate_compositions(kind: str, *params) -> CompositionSet:
    """Exhaustive, duplicate-free, lexicographically sorted index set.

    ``kind`` is ``"R"`` with params ``(beta,)`` or ``(lam, mu)``, or ``"T"``
    with params ``(lam, mu)``.
    """
    if any(int(p) != p or p < 0 for p in params):
        raise ValueError("parameters must be nonnegative integers")
    params = tuple(int(p) for p in params)
    if max(params, default=0) > MAX_PARTITION_ORDER:
        raise ValueError(f"parameters above {MAX_PARTITION_ORDER} are refused (set size explosion)")
    if kind == "R" and len(params) == 1:
        (beta,) = params
        if beta < 1:
            raise ValueError("R(beta) needs beta >= 1")
        return CompositionSet("R", params, _partitions(beta))
    if kind == "R" and len(params) == 2:
        return CompositionSet("R", params, _r_lam_mu(*params))
    if kind == "T" and len(params) == 2:
        return CompositionSet("T", params, _weak_compositions(*params))
    raise ValueError(f"unknown index set {kind}{params}")


def _check_member(kind, params, a):
    a = tuple(a)
    if kind == "P" or kind == "l":
        (beta,) = params
        ok = len(a) == beta and all(x >= 0 for x in a) and sum((j + 1) * x for j, x in enumerate(a)) == beta
    elif kind == "W":
        lam, mu = params
        ok = (
            len(a) == lam + 1
            and all(x >= 0 for x in a)
            and sum(j * x for j, x in enumerate(a)) == lam
            and sum(a) == mu
        )
    elif kind == "N":
        lam, mu = params
        ok = len(a) == lam and all(x >= 0 for x in a) and sum(a) == mu
    else:
        raise ValueError(f"unknown coefficient kind {kind!r}")
    if not ok:
        raise ValueError(f"{a} is not in the index set of {kind}{params}")
    return a


def composition_coefficient(kind: str, params, a, reading: str = "factorial") -> int:
    """Exact value of P, l, W or N at ``a`` (membership is checked)."""
    params = tuple(params) if isinstance(params, (tuple, list)) else (params,)
    a = _check_member(kind, params, a)
    fact = math.factorial
    if kind == "P":
        (beta,) = params
        den = 1
        for j, aj in enumerate(a, start=1):
            den *= fact(j) ** aj * fact(aj)
        return fact(beta) // den
    if kind == "l":
        return sum(a)
    if kind == "N":
        lam, mu = params
        den = 1
        for aj in a:
            den *= fact(aj)
        return fact(mu) // den
    lam, mu = params
    den = 1
    for j, aj in enumerate(a[1:], start=1):
        den *= fact(j) ** aj * fact(aj)
    tail = Fraction(fact(lam), den)
    if reading == "factorial":
        val = Fraction(fact(mu), fact(a[0])) * tail
    elif reading == "literal":
        if a[0] == 0:
            raise ZeroDivisionError(f"literal reading of W{params} divides by a_0 = 0")
        val = Fraction(fact(mu), a[0]) * tail
    else:
        raise ValueError("reading must be 'factorial' or 'literal'")
    return val.numerator if val.denominator == 1 else val


def _values(j):
    return tuple(j.values) if hasattr(j, "values") else tuple(j)


def _monomial(vals, a):
    out = 1
    for j, aj in enumerate(a, start=1):
        if aj:
            out = out * vals[j] ** aj
    return out


def exp_derivative_factor(h_jet, beta: int):
    """sum_{a in R(beta)} P_beta(a) prod_j (h^(j))^a_j, i.e. d^beta exp(h) / exp(h)."""
    vals = _values(h_jet)
    if beta < 1:
        raise ValueError("beta must be positive")
    if beta > MAX_ORDER_1D:
        raise ValueError(f"order {beta} exceeds the cap {MAX_ORDER_1D}")
    if len(vals) <= beta:
        raise ValueError(f"jet of order {len(vals) - 1} is too short for beta = {beta}")
    return sum(composition_coefficient("P", beta, a) * _monomial(vals, a) for a in _partitions(beta))


def exp_derivative(h_jet, beta: int):
    """``d^beta exp(h)`` from the jet of h."""
    vals = _values(h_jet)
    return exp_derivative_factor(vals, beta) * math.exp(vals[0])


def _log_coefficient(l, one_plus_J):
    # (-1)^l (l-1)! / (1+J)^l
    return (-1) ** l * math.factorial(l - 1) / one_plus_J**l


def log_derivative_1d(J_jet, beta: int):
    """``d^beta log(1 + J)`` along one direction from the jet of J there."""
    vals = _values(J_jet)
    if beta < 1:
        raise ValueError("beta must be positive")
    if beta > MAX_ORDER_1D:
        raise ValueError(f"order {beta} exceeds the cap {MAX_ORDER_1D}")
    if len(vals) <= beta:
        raise ValueError(f"jet of order {len(vals) - 1} is too short for beta = {beta}")
    base = 1 + (Fraction(vals[0]) if isinstance(vals[0], int) else vals[0])
    if base <= 0:
        raise ValueError("1 + J must be positive")
    total = 0
    for a in _partitions(beta):
        l = sum(a)
        total = total + _log_coefficient(l, base) * composition_coefficient("P", beta, a) * _monomial(vals, a)
    return -total


def log_derivative_mixed(table, gamma: int, beta: int, reading: str = "factorial"):
    """``d_1^gamma d_2^beta log(1 + J)`` by the two-part partition formula.

    ``table[j][k]`` holds ``d_1^j d_2^k J`` for ``j <= gamma``, ``k <= beta``.

    The first part sums over pairs of partitions (b of gamma, a of beta)
    whose blocks are pure d_1 or pure d_2 derivatives; the second over
    partitions a of the d_2 order with the gamma d_1-derivatives distributed
    over the blocks (b in T(beta, gamma), c^k in R(b_k, a_k)), weighted by
    W and N. Blocks carrying no d_1 derivative contribute no factor in the
    second part.
    """
    if gamma < 1 or beta < 1:
        raise ValueError("gamma and beta must be positive")
    if gamma + beta > MAX_ORDER_MIXED:
        raise ValueError(f"total order {gamma + beta} exceeds the cap {MAX_ORDER_MIXED}")
    try:
        for j in range(gamma + 1):
            for k in range(beta + 1):
                table[j][k]
    except (IndexError, KeyError, TypeError):
        raise ValueError(f"mixed jet table must cover orders j <= {gamma}, k <= {beta}") from None
    J0 = table[0][0]
    base = 1 + (Fraction(J0) if isinstance(J0, int) else J0)
    if base <= 0:
        raise ValueError("1 + J must be positive")

    d1 = [table[j][0] for j in range(gamma + 1)]  # pure d_1 derivatives
    d2 = [table[0][k] for k in range(beta + 1)]  # pure d_2 derivatives

    first = 0
    for b in _partitions(gamma):
        lb = sum(b)
        Pb = composition_coefficient("P", gamma, b)
        mb = _monomial(d1, b)
        for a in _partitions(beta):
            la = sum(a)
            first = first + (
                _log_coefficient(la + lb, base)
                * composition_coefficient("P", beta, a)
                * Pb
                * _monomial(d2, a)
                * mb
            )

    second = 0
    for a in _partitions(beta):
        la = sum(a)
        Pa = composition_coefficient("P", beta, a)
        for b in _weak_compositions(beta, gamma):
            Nb = composition_coefficient("N", (beta, gamma), b)
            inner = 0
            choices = [_r_lam_mu(b[k - 1], a[k - 1]) for k in range(1, beta + 1)]
            for c in itertools.product(*choices):
                term = 1
                for k in range(1, beta + 1):
                    ck = c[k - 1]
                    term = term * composition_coefficient("W", (b[k - 1], a[k - 1]), ck, reading)
                    for j in range(1, b[k - 1] + 1):
                        if ck[j]:
                            term = term * table[j][k] ** ck[j]
                inner = inner + term
            second = second + _log_coefficient(la, base) * Pa * Nb * inner
    return -first - second


def _block_multiplicities(gamma, beta):
    """Multisets of blocks (j, k), j + k >= 1, using exactly gamma d_1's and beta d_2's."""
    types = [(j, k) for j in range(gamma + 1) for k in range(beta + 1) if j + k >= 1]
    out = []

    def rec(i, rg, rb, acc):
        if rg == 0 and rb == 0:
            out.append(dict(acc))
            return
        if i == len(types):
            return
        j, k = types[i]
        n = 0
        while n * j <= rg and n * k <= rb:
            if n:
                acc[(j, k)] = n
            rec(i + 1, rg - n * j, rb - n * k, acc)
            n += 1
        acc.pop((j, k), None)

    rec(0, gamma, beta, {})
    return out


def log_derivative_mixed_complete(table, gamma: int, beta: int):
    """``d_1^gamma d_2^beta log(1 + J)`` summed over all block types.

    Every set partition of the gamma + beta derivative slots is counted once
    by its multiset of block types (j, k) with multiplicities n_jk:

        sum  f^(n)(J) * gamma! beta! / prod (j! k!)^n_jk n_jk!  * prod (d_1^j d_2^k J)^n_jk

    where n = sum n_jk and f^(n)(J) = (-1)^(n-1) (n-1)! / (1+J)^n. Unlike the
    two-part formula this includes partitions mixing pure d_1 blocks with
    mixed blocks, and the factors of pure d_2 blocks.
    """
    if gamma < 0 or beta < 0 or gamma + beta < 1:
        raise ValueError("need gamma + beta >= 1")
    if gamma + beta > MAX_ORDER_MIXED:
        raise ValueError(f"total order {gamma + beta} exceeds the cap {MAX_ORDER_MIXED}")
    J0 = table[0][0]
    base = 1 + (Fraction(J0) if isinstance(J0, int) else J0)
    if base <= 0:
        raise ValueError("1 + J must be positive")
    fact = math.factorial
    total = 0
    for mult in _block_multiplicities(gamma, beta):
        n = sum(mult.values())
        den = 1
        mono = 1
        for (j, k), c in mult.items():
            den *= (fact(j) * fact(k)) ** c * fact(c)
            mono = mono * table[j][k] ** c
        coeff = Fraction(fact(gamma) * fact(beta), den)
        total = total - _log_coefficient(n, base) * coeff * mono
    return total


# ---------------------------------------------------------------------------
# verification against independent oracles


@dataclass(frozen=True)
class CheckRow:
    formula: str
    order: tuple
    passed: bool
    error: float
    note: str = ""


def _partition_count(n):
    # Euler's pentagonal number recurrence
    p = [1] + [0] * n
    for i in range(1, n + 1):
        k, s = 1, 0
        while True:
            g1, g2 = k * (3 * k - 1) // 2, k * (3 * k + 1) // 2
            if g1 > i:
                break
            sign = 1 if k % 2 else -1
            s += sign * p[i - g1]
            if g2 <= i:
                s += sign * p[i - g2]
            k += 1
        p[i] = s
    return p[n]


def _drop_exp(e):
    """Replace every ``exp(.)`` node by 1 (derivatives of exp(h) divided by exp(h))."""
    from . import smooth as sm

    if isinstance(e, sm.Func):
        return sm.ONE if e.name == "exp" else sm.func(e.name, _drop_exp(e.arg))
    if isinstance(e, sm.Neg):
        return sm.neg(_drop_exp(e.arg))
    if isinstance(e, sm.Pow):
        return sm.power(_drop_exp(e.base), e.exponent)
    ops = {sm.Add: sm.add, sm.Sub: sm.sub, sm.Mul: sm.mul, sm.Div: sm.div}
    for cls, op in ops.items():
        if isinstance(e, cls):
            return op(_drop_exp(e.left), _drop_exp(e.right))
    return e


def _poly_expr(coeffs):
    from .smooth import X, as_expr

    e = as_expr(0)
    for j, c in enumerate(coeffs):
        if c:
            e = e + as_expr(Fraction(c)) * X**j if j else e + as_expr(Fraction(c))
    return e


# rational test polynomials (coefficients in ascending powers) and points
_H_CASES = [
    ((0, 1), Fraction(0)),
    ((Fraction(1, 3), Fraction(1, 2), Fraction(-1, 5), Fraction(1, 7)), Fraction(2, 7)),
    ((0, Fraction(-2, 3), 0, Fraction(3, 4), Fraction(1, 9)), Fraction(-3, 5)),
]
_J_CASES = [
    ((0, 1), Fraction(1)),
    ((0, 1, 0, 1), Fraction(3, 10)),
    ((Fraction(1, 4), Fraction(-1, 3), Fraction(1, 5), 0, Fraction(-1, 8)), Fraction(1, 2)),
]
# bivariate J as {(i, j): c} for t^i x^j, with the evaluation point (t, x)
_J2_CASES = [
    ({(1, 1): 1}, (Fraction(1), Fraction(1))),
    ({(2, 1): 1}, (Fraction(1, 2), Fraction(1, 2))),
    ({(1, 1): 1, (3, 2): 1, (0, 3): Fraction(1, 3), (2, 0): 1}, (Fraction(1, 3), Fraction(2, 5))),
    ({(1, 0): Fraction(1, 2), (2, 2): Fraction(-1, 3), (1, 3): Fraction(1, 4), (0, 1): Fraction(2, 7)},
     (Fraction(-1, 4), Fraction(3, 5))),
]


def _shifted_taylor(poly, point, gamma, beta):
    """Taylor coefficients of a bivariate polynomial about ``point`` up to (gamma, beta)."""
    t0, x0 = point
    out = [[Fraction(0)] * (beta + 1) for _ in range(gamma + 1)]
    for (i, j), c in poly.items():
        for p in range(min(i, gamma) + 1):
            for q in range(min(j, beta) + 1):
                out[p][q] += Fraction(c) * math.comb(i, p) * math.comb(j, q) * t0 ** (i - p) * x0 ** (j - q)
    return out


def _log_series_oracle(poly, point, gamma, beta):
    """Exact ``d_1^gamma d_2^beta log(1+J)`` from the series identity A * dL = dA, A = 1 + J."""
    a = _shifted_taylor(poly, point, gamma, beta)
    a[0][0] += 1
    L = [[Fraction(0)] * (beta + 1) for _ in range(gamma + 1)]
    for i in range(gamma + 1):
        for j in range(beta + 1):
            if i == j == 0:
                continue
            if i:
                s = i * a[i][j]
                for p in range(i + 1):
                    for q in range(j + 1):
                        if (p, q) != (0, 0) and i - p >= 1:
                            s -= a[p][q] * (i - p) * L[i - p][j - q]
            else:
                s = j * a[0][j]
                for q in range(1, j + 1):
                    s -= a[0][q] * (j - q) * L[0][j - q]
            L[i][j] = s / ((i or j) * a[0][0])
    return L[gamma][beta] * math.factorial(gamma) * math.factorial(beta)


def _derivative_table(poly, point, gamma, beta):
    tay = _shifted_taylor(poly, point, gamma, beta)
    return [[tay[j][k] * math.factorial(j) * math.factorial(k) for k in range(beta + 1)] for j in range(gamma + 1)]


def verify_formulas(max_order: int = 6, max_mixed: int = 5, max_partition: int = 20, tol: float = 1e-9):
    """Check every formula against an independent oracle; one row per formula and order.

    Items 1 and 2 are compared exactly (rational arithmetic) with repeated
    symbolic differentiation; the mixed formulas in floating point against the
    exact bivariate log series, with a relative tolerance ``tol``. The
    two-part mixed formula is checked under both readings of W; the literal
    reading is reported as undefined where it divides by a_0 = 0.
    """
    from .smooth import Func, differentiate, evaluate

    rows = []
    for beta in range(1, max_partition + 1):
        n, p = len(_partitions(beta)), _partition_count(beta)
        rows.append(CheckRow("partition_count", (beta,), n == p, float(abs(n - p)), f"|R|={n}, p={p}"))

    for beta in range(1, max_order + 1):
        ok, err = True, 0.0
        for coeffs, x0 in _H_CASES:
            h = _poly_expr(coeffs)
            jet_h = [evaluate(differentiate(h, j), x0) for j in range(beta + 1)]
            want = evaluate(_drop_exp(differentiate(Func("exp", h), beta)), x0)
            got = exp_derivative_factor(jet_h, beta)
            ok &= got == want
            err = max(err, abs(float(got - want)))
        rows.append(CheckRow("exp", (beta,), ok, err, "exact"))

    for beta in range(1, max_order + 1):
        ok, err = True, 0.0
        for coeffs, x0 in _J_CASES:
            J = _poly_expr(coeffs)
            jet_J = [evaluate(differentiate(J, j), x0) for j in range(beta + 1)]
            want = evaluate(differentiate(Func("log", 1 + J), beta), x0)
            got = log_derivative_1d(jet_J, beta)
            ok &= got == want
            err = max(err, abs(float(got - want)))
        rows.append(CheckRow("log_1d", (beta,), ok, err, "exact"))

    variants = [
        ("log_mixed[a0!]", lambda tb, g, b: log_derivative_mixed(tb, g, b, "factorial")),
        ("log_mixed[a0]", lambda tb, g, b: log_derivative_mixed(tb, g, b, "literal")),
        ("log_mixed_complete", log_derivative_mixed_complete),
    ]
    for total in range(2, max_mixed + 1):
        for gamma in range(1, total):
            beta = total - gamma
            for name, fn in variants:
                ok, err, note = True, 0.0, ""
                for poly, pt in _J2_CASES:
                    want = float(_log_series_oracle(poly, pt, gamma, beta))
                    table = [[float(v) for v in row] for row in _derivative_table(poly, pt, gamma, beta)]
                    try:
                        got = float(fn(table, gamma, beta))
                    except ZeroDivisionError:
                        ok, err, note = False, math.inf, "undefined (a_0 = 0)"
                        break
                    e = abs(got - want) / max(1.0, abs(want))
                    err = max(err, e)
                    ok &= e <= tol
                rows.append(CheckRow(name, (gamma, beta), ok, err, note))
    return rows


def format_check_table(rows) -> str:
    lines = [f"{'formula':<20} {'order':<8} {'verdict':<7} {'error':>10}  note"]
    for r in rows:
        order = ",".join(str(o) for o in r.order)
        lines.append(f"{r.formula:<20} {order:<8} {'pass' if r.passed else 'FAIL':<7} {r.error:>10.3g}  {r.note}")
    return "\n".join(lines)
