"""Expression algebra for smooth functions of one real variable.

Expressions are immutable trees. They can be parsed from text, printed back,
differentiated exactly to any order (capped at ``MAX_DERIVATIVE_ORDER``),
evaluated at floats, numpy arrays or ``fractions.Fraction`` points, and
expanded into derivative jets by truncated Taylor arithmetic.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' integer)? | '-' factor
    atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
    func   := exp | log | sin | cos | sinh | cosh

The integer exponent may carry a sign, optionally in parentheses: ``x^-2``
and ``x^(-2)`` are both accepted.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

__all__ = [
    "MAX_DERIVATIVE_ORDER",
    "FUNCTIONS",
    "Expr",
    "Const",
    "Var",
    "Neg",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Func",
    "X",
    "Jet",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "DomainError",
    "parse_expression",
    "to_string",
    "differentiate",
    "evaluate",
    "taylor",
    "jet",
    "as_expr",
]

MAX_DERIVATIVE_ORDER = 16
FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh")


class ExpressionSyntaxError(ValueError):
    """Malformed expression text.

    ``offset`` is the byte offset of the offending token and ``expected``
    the set of token kinds that would have been accepted there.
    """

    def __init__(self, text, offset, expected, found=None):
        self.text = text
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found
        what = "end of input" if found is None else repr(found)
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"syntax error at offset {offset}: found {what}, expected one of {{{exp}}}")


class UnknownIdentifierError(ValueError):
    def __init__(self, text, offset, name):
        self.text = text
        self.offset = offset
        self.name = name
        super().__init__(
            f"unknown identifier {name!r} at offset {offset}; "
            f"known: x, {', '.join(FUNCTIONS)}"
        )


class DomainError(ArithmeticError):
    """Evaluation outside the domain of a node (log of a nonpositive value, division by zero)."""

    def __init__(self, node, message):
        self.node = node
        super().__init__(f"{message} in node {to_string(node)}")


# ---------------------------------------------------------------------------
# nodes


class Expr:
    """Base class of expression nodes. Arithmetic operators build new trees."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, k):
        if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
            raise TypeError("only integer powers are supported")
        return power(self, int(k))

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: Real


@dataclass(frozen=True, slots=True)
class Var(Expr):
    pass


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


X = Var()
ZERO = Const(0)
ONE = Const(1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse_expression(value)
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return Const(int(value))
    if isinstance(value, (float, Fraction, np.floating)):
        return Const(value if isinstance(value, Fraction) else float(value))
    raise TypeError(f"cannot convert {type(value).__name__} to an expression")


# ---------------------------------------------------------------------------
# smart constructors: constant folding only


def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


def neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if isinstance(b, Neg):
        return sub(a, b.arg)
    return Add(a, b)


def sub(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    if isinstance(b, Neg):
        return add(a, b.arg)
    return Sub(a, b)


def mul(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a, -1):
        return neg(b)
    if _is_const(b, -1):
        return neg(a)
    if _is_const(b):
        a, b = b, a
    if isinstance(a, Const):
        # fold nested constant coefficients: c1*(c2*e) -> (c1*c2)*e
        if isinstance(b, Mul) and isinstance(b.left, Const):
            return mul(Const(a.value * b.left.value), b.right)
        if isinstance(b, Neg):
            return mul(Const(-a.value), b.arg)
    if isinstance(a, Neg) and isinstance(b, Neg):
        return mul(a.arg, b.arg)
    return Mul(a, b)


def div(a, b):
    if _is_const(b, 0):
        raise ZeroDivisionError("division by the constant 0")
    if _is_const(a) and _is_const(b):
        if isinstance(a.value, (int, Fraction)) and isinstance(b.value, (int, Fraction)):
            q = Fraction(a.value) / Fraction(b.value)
            return Const(q.numerator if q.denominator == 1 else q)
        return Const(a.value / b.value)
    if _is_const(a, 0):
        return ZERO
    if _is_const(b, 1):
        return a
    return Div(a, b)


def power(a, k):
    if k == 0:
        return ONE
    if k == 1:
        return a
    if isinstance(a, Const):
        if k < 0 and a.value == 0:
            raise ZeroDivisionError("negative power of the constant 0")
        v = a.value
        if isinstance(v, int):
            return Const(Fraction(v) ** k if k < 0 else v**k)
        return Const(v**k)
    if isinstance(a, Pow):
        return power(a.base, a.exponent * k)
    return Pow(a, k)


def func(name, a):
    return Func(name, a)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExpressionSyntaxError(
                text, pos, {"number", "x", "function", "operator", "'('", "')'"}, text[pos]
            )
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, value, offset = self.peek()
        raise ExpressionSyntaxError(self.text, offset, expected, value)

    def expect_op(self, op):
        kind, value, _ = self.peek()
        if kind != "op" or value != op:
            self.fail({repr(op)})
        self.advance()

    def parse(self):
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return e

    def expr(self):
        e = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                e = Add(e, rhs) if value == "+" else Sub(e, rhs)
            else:
                return e

    def term(self):
        e = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                rhs = self.factor()
                e = Mul(e, rhs) if value == "*" else Div(e, rhs)
            else:
                return e

    def factor(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.factor())
        base = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return Pow(base, self.integer())
        return base

    def integer(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "(":
            self.advance()
            k = self.signed_integer()
            self.expect_op(")")
            return k
        return self.signed_integer()

    def signed_integer(self):
        sign = 1
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            self.advance()
            sign = -1 if value == "-" else 1
        kind, value, _ = self.peek()
        if kind != "num" or not value.isdigit():
            self.fail({"integer"})
        self.advance()
        return sign * int(value)

    def atom(self):
        kind, value, offset = self.peek()
        if kind == "num":
            self.advance()
            if re.fullmatch(r"\d+", value):
                return Const(int(value))
            return Const(float(value))
        if kind == "name":
            self.advance()
            if value == "x":
                return X
            if value not in FUNCTIONS:
                raise UnknownIdentifierError(self.text, offset, value)
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return Func(value, arg)
        if kind == "op" and value == "(":
            self.advance()
            e = self.expr()
            self.expect_op(")")
            return e
        self.fail({"number", "x", "function", "'('", "'-'"})


def parse_expression(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    >>> to_string(parse_expression("sin(x)^2 + 1"))
    'sin(x)^2 + 1'
    """
    if not isinstance(text, str) or not text.strip():
        raise ExpressionSyntaxError(text or "", 0, {"number", "x", "function", "'('", "'-'"})
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _fmt_number(v):
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    r = repr(float(v))
    if r in ("inf", "-inf", "nan"):
        raise ValueError(f"cannot print non-finite constant {r}")
    return r


def _prec(e):
    if isinstance(e, Const):
        v = e.value
        if v < 0:
            return 3
        if isinstance(v, Fraction) and v.denominator != 1:
            return 2
        return 5
    return _PREC.get(type(e), 5)


def to_string(e: Expr) -> str:
    """Canonical text form; ``parse_expression(to_string(e))`` evaluates like ``e``."""

    def wrap(sub, min_prec):
        s = to_string(sub)
        return f"({s})" if _prec(sub) < min_prec else s

    if isinstance(e, Const):
        v = e.value
        if v < 0:
            return "-" + _fmt_number(-v)
        return _fmt_number(v)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return "-" + wrap(e.arg, 3)
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        return wrap(e.left, 1) + op + wrap(e.right, 2)
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        return wrap(e.left, 2) + op + wrap(e.right, 3)
    if isinstance(e, Pow):
        k = e.exponent
        return wrap(e.base, 5) + (f"^{k}" if k >= 0 else f"^({k})")
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# differentiation


def _d(e, cache):
    key = id(e)
    hit = cache.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(e, Const):
        r = ZERO
    elif isinstance(e, Var):
        r = ONE
    elif isinstance(e, Neg):
        r = neg(_d(e.arg, cache))
    elif isinstance(e, Add):
        r = add(_d(e.left, cache), _d(e.right, cache))
    elif isinstance(e, Sub):
        r = sub(_d(e.left, cache), _d(e.right, cache))
    elif isinstance(e, Mul):
        r = add(mul(_d(e.left, cache), e.right), mul(e.left, _d(e.right, cache)))
    elif isinstance(e, Div):
        da, db = _d(e.left, cache), _d(e.right, cache)
        if _is_const(db, 0):
            r = div(da, e.right)
        else:
            r = div(sub(mul(da, e.right), mul(e.left, db)), power(e.right, 2))
    elif isinstance(e, Pow):
        k = e.exponent
        r = mul(mul(Const(k), power(e.base, k - 1)), _d(e.base, cache))
    elif isinstance(e, Func):
        a = e.arg
        da = _d(a, cache)
        outer = {
            "exp": lambda: e,
            "log": lambda: div(ONE, a),
            "sin": lambda: Func("cos", a),
            "cos": lambda: neg(Func("sin", a)),
            "sinh": lambda: Func("cosh", a),
            "cosh": lambda: Func("sinh", a),
        }[e.name]()
        if e.name == "log":
            r = div(da, a)
        else:
            r = mul(outer, da)
    else:
        raise TypeError(f"not an expression: {e!r}")
    # keep e alive so id() stays unique for the lifetime of the cache
    cache[key] = (e, r)
    return r


def differentiate(e: Expr, n: int = 1) -> Expr:
    """Exact ``n``-th derivative of ``e`` with respect to ``x``."""
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    if n > MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order {n} exceeds the cap {MAX_DERIVATIVE_ORDER}")
    e = as_expr(e)
    for _ in range(n):
        e = _d(e, {})
    return e


# ---------------------------------------------------------------------------
# evaluation


def _is_array(x):
    return isinstance(x, np.ndarray)


_NP = {"exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos, "sinh": np.sinh, "cosh": np.cosh}
_MATH = {
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
}


def _check_log(node, v):
    bad = np.any(v <= 0) if _is_array(v) else v <= 0
    if bad:
        raise DomainError(node, "log of a nonpositive value")


def _check_div(node, v):
    bad = np.any(v == 0) if _is_array(v) else v == 0
    if bad:
        raise DomainError(node, "division by zero")


def _eval(e, x, cache):
    key = id(e)
    hit = cache.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(e, Const):
        r = float(e.value) if _is_array(x) else e.value
    elif isinstance(e, Var):
        r = x
    elif isinstance(e, Neg):
        r = -_eval(e.arg, x, cache)
    elif isinstance(e, Add):
        r = _eval(e.left, x, cache) + _eval(e.right, x, cache)
    elif isinstance(e, Sub):
        r = _eval(e.left, x, cache) - _eval(e.right, x, cache)
    elif isinstance(e, Mul):
        r = _eval(e.left, x, cache) * _eval(e.right, x, cache)
    elif isinstance(e, Div):
        den = _eval(e.right, x, cache)
        _check_div(e, den)
        num = _eval(e.left, x, cache)
        if isinstance(num, int) and isinstance(den, int):
            r = Fraction(num, den)
        else:
            r = num / den
    elif isinstance(e, Pow):
        b = _eval(e.base, x, cache)
        if e.exponent < 0:
            _check_div(e, b)
            if isinstance(b, int):
                b = Fraction(b)
            elif _is_array(b):
                b = b.astype(float)
        r = b**e.exponent
    elif isinstance(e, Func):
        a = _eval(e.arg, x, cache)
        if e.name == "log":
            _check_log(e, a)
        if _is_array(a):
            r = _NP[e.name](a)
        else:
            try:
                r = _MATH[e.name](float(a))
            except OverflowError:
                r = math.inf
    else:
        raise TypeError(f"not an expression: {e!r}")
    cache[key] = (e, r)
    return r


def evaluate(e: Expr, x):
    """Value of ``e`` at ``x`` (float, Fraction or numpy array).

    Polynomial/rational expressions evaluated at a ``Fraction`` stay exact.
    """
    if isinstance(x, (list, tuple)):
        x = np.asarray(x, dtype=float)
    r = _eval(e, x, {})
    if _is_array(x) and not _is_array(r):
        r = np.full(x.shape, float(r))
    return r


# ---------------------------------------------------------------------------
# truncated Taylor arithmetic
#
# A series is a list of n+1 coefficients c[k] = f^(k)(x0)/k!; each coefficient
# is a scalar (float or Fraction) or a numpy array over a batch of points.


def _scal_div(v, k):
    if isinstance(v, (int, Fraction)):
        return Fraction(v) / k
    return v / k


def _t_mul(a, b):
    n = len(a)
    return [sum(a[j] * b[k - j] for j in range(k + 1)) for k in range(n)]


def _t_div(a, b, node):
    n = len(a)
    _check_div(node, b[0])
    q = []
    for k in range(n):
        s = a[k]
        for j in range(1, k + 1):
            s = s - b[j] * q[k - j]
        if isinstance(s, int) and isinstance(b[0], int):
            q.append(Fraction(s, b[0]))
        else:
            q.append(s / b[0])
    return q


def _t_pow(a, k, node):
    n = len(a)
    if k < 0:
        one = [1] + [0] * (n - 1)
        return _t_div(one, _t_pow(a, -k, node), node)
    result = [1] + [0] * (n - 1)
    base = a
    while k:
        if k & 1:
            result = _t_mul(result, base)
        k >>= 1
        if k:
            base = _t_mul(base, base)
    return result


def _fn(name, v):
    if _is_array(v):
        return _NP[name](v)
    try:
        return _MATH[name](float(v))
    except OverflowError:
        return math.inf


def _t_func(name, a, node):
    n = len(a)
    a0 = a[0]
    if name == "exp":
        b = [_fn("exp", a0)]
        for k in range(1, n):
            s = sum(j * a[j] * b[k - j] for j in range(1, k + 1))
            b.append(_scal_div(s, k))
        return b
    if name == "log":
        _check_log(node, a0)
        b = [_fn("log", a0)]
        for k in range(1, n):
            s = sum(j * b[j] * a[k - j] for j in range(1, k))
            b.append((a[k] - _scal_div(s, k)) / a0)
        return b
    if name in ("sin", "cos"):
        s, c = [_fn("sin", a0)], [_fn("cos", a0)]
        for k in range(1, n):
            s.append(_scal_div(sum(j * a[j] * c[k - j] for j in range(1, k + 1)), k))
            c.append(-_scal_div(sum(j * a[j] * s[k - j] for j in range(1, k + 1)), k))
        return s if name == "sin" else c
    if name in ("sinh", "cosh"):
        s, c = [_fn("sinh", a0)], [_fn("cosh", a0)]
        for k in range(1, n):
            s.append(_scal_div(sum(j * a[j] * c[k - j] for j in range(1, k + 1)), k))
            c.append(_scal_div(sum(j * a[j] * s[k - j] for j in range(1, k + 1)), k))
        return s if name == "sinh" else c
    raise ValueError(name)


def _taylor(e, x, n, cache):
    key = id(e)
    hit = cache.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(e, Const):
        r = [float(e.value) if _is_array(x) else e.value] + [0] * n
    elif isinstance(e, Var):
        r = [x] + ([1] if n >= 1 else []) + [0] * (n - 1)
    elif isinstance(e, Neg):
        r = [-c for c in _taylor(e.arg, x, n, cache)]
    elif isinstance(e, Add):
        r = [p + q for p, q in zip(_taylor(e.left, x, n, cache), _taylor(e.right, x, n, cache))]
    elif isinstance(e, Sub):
        r = [p - q for p, q in zip(_taylor(e.left, x, n, cache), _taylor(e.right, x, n, cache))]
    elif isinstance(e, Mul):
        r = _t_mul(_taylor(e.left, x, n, cache), _taylor(e.right, x, n, cache))
    elif isinstance(e, Div):
        r = _t_div(_taylor(e.left, x, n, cache), _taylor(e.right, x, n, cache), e)
    elif isinstance(e, Pow):
        base = _taylor(e.base, x, n, cache)
        if e.exponent < 0:
            _check_div(e, base[0])
        r = _t_pow(base, e.exponent, e)
    elif isinstance(e, Func):
        r = _t_func(e.name, _taylor(e.arg, x, n, cache), e)
    else:
        raise TypeError(f"not an expression: {e!r}")
    cache[key] = (e, r)
    return r


def taylor(e: Expr, x, n: int):
    """Taylor coefficients ``[f(x), f'(x), f''(x)/2!, ...]`` up to order ``n``.

    For array ``x`` the result is a float array of shape ``(n+1,) + x.shape``;
    otherwise a list of scalars.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    if isinstance(x, (list, tuple)):
        x = np.asarray(x, dtype=float)
    coeffs = _taylor(as_expr(e), x, n, {})
    if _is_array(x):
        out = np.empty((n + 1,) + x.shape)
        for k, c in enumerate(coeffs):
            out[k] = c
        return out
    return coeffs


@dataclass(frozen=True)
class Jet:
    """Derivative values ``values[k] = f^(k)(x)`` for ``k = 0..order``.

    ``x`` may be an array, in which case ``values`` has shape ``(order+1,) + x.shape``.
    """

    x: object
    order: int
    values: object

    def __post_init__(self):
        if len(self.values) != self.order + 1:
            raise ValueError("jet must carry order+1 values")

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return self.order + 1


def jet(e: Expr, x, n: int) -> Jet:
    """Derivatives of ``e`` at ``x`` through order ``n``.

    Computed by truncated Taylor arithmetic, not by differentiating the tree,
    so it is cheap even at high order. Exact for rational expressions at a
    ``Fraction`` point.
    """
    if n > MAX_DERIVATIVE_ORDER:
        raise ValueError(f"jet order {n} exceeds the cap {MAX_DERIVATIVE_ORDER}")
    coeffs = taylor(e, x, n)
    if isinstance(coeffs, np.ndarray):
        fact = np.array([math.factorial(k) for k in range(n + 1)], dtype=float)
        values = coeffs * fact.reshape((-1,) + (1,) * (coeffs.ndim - 1))
        return Jet(x, n, values)
    values = tuple(c * math.factorial(k) for k, c in enumerate(coeffs))
    return Jet(x, n, values)
