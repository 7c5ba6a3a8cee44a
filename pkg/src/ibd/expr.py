"""Integrand expressions: parsing, printing, evaluation, derivatives, series.

Grammar (whitespace insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' power)?          # right-assoc; no unary minus in exponents
    atom   := NUMBER | CONST | IDENT | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

Numbers are integers or decimals (with optional exponent) and are stored as
exact ``Fraction`` values; a rational literal ``p/q`` is an integer division
folded at parse time, so ``parse(str(e)) == e`` holds structurally.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .exact import GaussQ, simplify_scalar
from .special import DomainError, binom_neg, cgamma, clog, hurwitz_zeta, riemann_zeta

__all__ = [
    "Expr", "Number", "Const", "Var", "Neg", "BinOp", "Call",
    "ParseError", "UnboundVariable", "NotDifferentiable", "TaylorError", "NotExpPoly",
    "DomainError", "ExpPoly", "parse", "evaluate", "evaluate_array", "diff", "taylor_coeffs",
    "classify_exp_poly", "free_vars", "to_string", "exp_poly_terms",
]

FUNCTIONS = {"sin": 1, "cos": 1, "exp": 1, "log": 1, "sqrt": 1, "gamma": 1,
             "zeta": 1, "hzeta": 2, "H": 1}
CONSTANTS = ("pi", "e", "i")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class UnboundVariable(KeyError):
    pass


class NotDifferentiable(ValueError):
    pass


class TaylorError(ValueError):
    """Pole, branch point or unsupported node at the expansion center."""


class NotExpPoly(ValueError):
    """Integrand is not a finite sum of c * x^n * exp(-b x) with b > 0."""


# ---------------------------------------------------------------------------
# AST


class Expr:
    __slots__ = ()

    def __str__(self):
        return to_string(self)

    # convenience operators for building trees in code
    def __add__(self, o):
        return add(self, _lift(o))

    def __radd__(self, o):
        return add(_lift(o), self)

    def __sub__(self, o):
        return sub(self, _lift(o))

    def __rsub__(self, o):
        return sub(_lift(o), self)

    def __mul__(self, o):
        return mul(self, _lift(o))

    def __rmul__(self, o):
        return mul(_lift(o), self)

    def __truediv__(self, o):
        return div(self, _lift(o))

    def __rtruediv__(self, o):
        return div(_lift(o), self)

    def __pow__(self, o):
        return power(self, _lift(o))

    def __neg__(self):
        return neg(self)


@dataclass(frozen=True, eq=True)
class Number(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Const(Expr):
    name: str


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    name: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


ZERO = Number(Fraction(0))
ONE = Number(Fraction(1))


def _lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Number(Fraction(x))
    if isinstance(x, float):
        return Number(Fraction(repr(x)))
    if isinstance(x, str):
        return parse(x)
    raise TypeError(f"cannot lift {type(x).__name__} into an expression")


def num(x) -> Expr:
    """Expression for a scalar: exact numbers stay exact, complex via ``i``."""
    g = GaussQ.coerce(x)
    if g is not None:
        if g.im == 0:
            return Number(g.re)
    else:
        z = complex(x)
        g = GaussQ(Fraction(repr(z.real)), Fraction(repr(z.imag)))
    if g.im == 0:
        return Number(g.re)
    im_part = mul(Number(abs(g.im)), Const("i"))
    if not g.re:
        return im_part if g.im > 0 else neg(im_part)
    return add(Number(g.re), im_part) if g.im > 0 else sub(Number(g.re), im_part)


# smart constructors: light folding only, never general simplification


def _is_num(e, v=None) -> bool:
    return isinstance(e, Number) and (v is None or e.value == v)


def neg(a: Expr) -> Expr:
    if isinstance(a, Number):
        return Number(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0):
        return b
    if _is_num(b, 0):
        return a
    if isinstance(b, Number) and b.value < 0:
        return BinOp("-", a, Number(-b.value))
    if isinstance(b, Neg):
        return BinOp("-", a, b.arg)
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 0):
        return a
    if _is_num(a, 0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0) or _is_num(b, 0):
        return ZERO
    if _is_num(a, 1):
        return b
    if _is_num(b, 1):
        return a
    if _is_num(a, -1):
        return neg(b)
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 1):
        return a
    if isinstance(a, Number) and isinstance(b, Number) and b.value != 0:
        return Number(a.value / b.value)
    if _is_num(a, 0) and not _is_num(b, 0):
        return ZERO
    return BinOp("/", a, b)


def power(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 1):
        return a
    if _is_num(b, 0):
        return ONE
    return BinOp("^", a, b)


def call(name: str, *args: Expr) -> Expr:
    return Call(name, tuple(args))


# ---------------------------------------------------------------------------
# Lexing and parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", len(text[:start].encode()))
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), len(text[:start].encode())))
        pos = m.end()
    toks.append(("end", "", len(text.encode())))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, v, off = self.take()
        if v != value or kind not in ("op",):
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", off)

    def parse(self) -> Expr:
        e = self.expr()
        kind, v, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {v!r}", off)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.term()
            left = BinOp(op, left, right)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.unary()
            if (op == "/" and isinstance(left, Number) and isinstance(right, Number)
                    and right.value != 0):
                left = Number(left.value / right.value)
            else:
                left = BinOp(op, left, right)
        return left

    def unary(self) -> Expr:
        if self.peek() == ("op", "-", self.peek()[2]):
            self.take()
            arg = self.unary()
            return Number(-arg.value) if isinstance(arg, Number) else Neg(arg)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, v, off = self.peek()
            if kind == "op" and v in ("-", "+"):
                raise ParseError("sign in exponent requires parentheses", off)
            return BinOp("^", base, self.power())
        return base

    def atom(self) -> Expr:
        kind, v, off = self.take()
        if kind == "num":
            return Number(Fraction(v))
        if kind == "id":
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                if v not in FUNCTIONS:
                    raise ParseError(f"unknown function {v!r}", off)
                self.take()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[v]:
                    raise ParseError(f"{v} takes {FUNCTIONS[v]} argument(s), got {len(args)}", off)
                return Call(v, tuple(args))
            if v in FUNCTIONS:
                raise ParseError(f"function {v!r} used without arguments", off)
            if v in CONSTANTS:
                return Const(v)
            return Var(v)
        if kind == "op" and v == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {'end of input' if kind == 'end' else repr(v)}", off)


def parse(text: str) -> Expr:
    """Parse DSL text into an expression tree."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, Number):
        if e.value < 0:
            return _PREC_NEG if e.value.denominator == 1 else _PREC_MUL
        return _PREC_ATOM if e.value.denominator == 1 else _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, BinOp):
        return {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL, "^": _PREC_POW}[e.op]
    return _PREC_ATOM


def _wrap(e: Expr, need: int) -> str:
    s = to_string(e)
    return f"({s})" if _prec(e) < need else s


def _decimal_string(v: Fraction) -> str | None:
    """Exact decimal form for long terminating fractions (those that came from decimals)."""
    d, twos, fives = v.denominator, 0, 0
    while d % 2 == 0:
        d, twos = d // 2, twos + 1
    while d % 5 == 0:
        d, fives = d // 5, fives + 1
    if d != 1 or v.denominator < 1000:
        return None
    places = max(twos, fives)
    digits = str(abs(v.numerator) * 10**places // v.denominator).rjust(places + 1, "0")
    return ("-" if v < 0 else "") + digits[:-places] + "." + digits[-places:]


def to_string(e: Expr) -> str:
    if isinstance(e, Number):
        v = e.value
        if v.denominator == 1:
            return str(v.numerator)
        dec = _decimal_string(v)
        return dec if dec is not None else f"{v.numerator}/{v.denominator}"
    if isinstance(e, (Const, Var)):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _PREC_NEG)
    if isinstance(e, BinOp):
        if e.op in "+-":
            return f"{_wrap(e.left, _PREC_ADD)}{e.op}{_wrap(e.right, _PREC_MUL)}"
        if e.op in "*/":
            return f"{_wrap(e.left, _PREC_MUL)}{e.op}{_wrap(e.right, _PREC_NEG)}"
        # a fraction literal must not sit directly under ^ or it would reparse as a division
        return f"{_wrap(e.left, _PREC_ATOM)}^{_wrap(e.right, _PREC_POW)}"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_string(a) for a in e.args)})"
    raise TypeError(type(e).__name__)


# ---------------------------------------------------------------------------
# Evaluation


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return free_vars(e.arg)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Call):
        out = set()
        for a in e.args:
            out |= free_vars(a)
        return out
    return set()


_CONST_VALUES = {"pi": complex(math.pi), "e": complex(math.e), "i": 1j}


def _is_real(z: complex) -> bool:
    return z.imag == 0


def evaluate(e: Expr, binding: Mapping[str, complex] | None = None, *, h0=1) -> complex:
    """Evaluate at a point. ``h0`` is the value used for H(0).

    Real-valued subtrees with real inputs are computed with real arithmetic,
    so they come back with an exactly zero imaginary part.
    """
    binding = binding or {}
    return _ev(e, binding, h0)


def _ev(e, b, h0) -> complex:
    if isinstance(e, Number):
        return complex(float(e.value))
    if isinstance(e, Const):
        return _CONST_VALUES[e.name]
    if isinstance(e, Var):
        try:
            return complex(b[e.name])
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, Neg):
        return -_ev(e.arg, b, h0)
    if isinstance(e, BinOp):
        x = _ev(e.left, b, h0)
        y = _ev(e.right, b, h0)
        if e.op == "+":
            return x + y
        if e.op == "-":
            return x - y
        if e.op == "*":
            return x * y
        if e.op == "/":
            if y == 0:
                raise DomainError("division by zero")
            return x / y
        return _pow(x, y, e.right)
    if isinstance(e, Call):
        args = [_ev(a, b, h0) for a in e.args]
        return _call(e.name, args, h0)
    raise TypeError(type(e).__name__)


def _pow(x: complex, y: complex, yexpr: Expr) -> complex:
    if x == 0:
        if y.real > 0:
            return 0j
        if y == 0:
            return 1 + 0j
        raise DomainError("0 raised to a nonpositive power")
    if _is_real(y):
        yr = y.real
        if isinstance(yexpr, Number) and yexpr.value.denominator == 1 and _is_real(x):
            return complex(x.real ** int(yexpr.value))
        if _is_real(x) and x.real > 0:
            return complex(x.real**yr)
    return x**y


def _call(name: str, args: list[complex], h0) -> complex:
    z = args[0]
    real = _is_real(z)
    if name == "sin":
        return complex(math.sin(z.real)) if real else cmath.sin(z)
    if name == "cos":
        return complex(math.cos(z.real)) if real else cmath.cos(z)
    if name == "exp":
        return complex(math.exp(z.real)) if real else cmath.exp(z)
    if name == "log":
        if real and z.real > 0:
            return complex(math.log(z.real))
        return clog(z)
    if name == "sqrt":
        if real and z.real >= 0:
            return complex(math.sqrt(z.real))
        return cmath.sqrt(z)
    if name == "gamma":
        return cgamma(z)
    if name == "zeta":
        if not real:
            raise DomainError("zeta is implemented for real arguments only")
        return complex(riemann_zeta(z.real))
    if name == "hzeta":
        a = args[1]
        if not (real and _is_real(a)):
            raise DomainError("hzeta is implemented for real arguments only")
        return complex(hurwitz_zeta(z.real, a.real))
    if name == "H":
        if not real:
            raise DomainError("H needs a real argument")
        if z.real > 0:
            return 1 + 0j
        if z.real < 0:
            return 0j
        return complex(float(h0))
    raise DomainError(f"unknown function {name}")


_NP_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log, "sqrt": np.sqrt}


def evaluate_array(e: Expr, binding: Mapping[str, np.ndarray], *, h0=1) -> np.ndarray:
    """Vectorized real evaluation over numpy arrays (no domain checks).

    Functions without a numpy counterpart fall back to :func:`evaluate`
    element by element.
    """
    if isinstance(e, Number):
        return np.asarray(float(e.value))
    if isinstance(e, Const):
        if e.name == "i":
            raise DomainError("evaluate_array is real-valued")
        return np.asarray(_CONST_VALUES[e.name].real)
    if isinstance(e, Var):
        try:
            return np.asarray(binding[e.name], dtype=float)
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, Neg):
        return -evaluate_array(e.arg, binding, h0=h0)
    if isinstance(e, BinOp):
        x = evaluate_array(e.left, binding, h0=h0)
        y = evaluate_array(e.right, binding, h0=h0)
        if e.op == "+":
            return x + y
        if e.op == "-":
            return x - y
        if e.op == "*":
            return x * y
        if e.op == "/":
            return x / y
        return np.power(x, y)
    if isinstance(e, Call):
        args = [evaluate_array(a, binding, h0=h0) for a in e.args]
        if e.name in _NP_FUNCS:
            return _NP_FUNCS[e.name](args[0])
        if e.name == "H":
            return np.where(args[0] > 0, 1.0, np.where(args[0] < 0, 0.0, float(h0)))
        args = np.broadcast_arrays(*args)
        out = np.empty(args[0].shape)
        for idx in np.ndindex(out.shape):
            out[idx] = _call(e.name, [complex(a[idx]) for a in args], h0).real
        return out
    raise TypeError(type(e).__name__)


# ---------------------------------------------------------------------------
# Symbolic differentiation


def diff(e: Expr, var: str) -> Expr:
    """Exact derivative. H, zeta, hzeta and gamma are not differentiated."""
    if var not in free_vars(e):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Neg):
        return neg(diff(e.arg, var))
    if isinstance(e, BinOp):
        u, v = e.left, e.right
        du, dv = diff(u, var), diff(v, var)
        if e.op == "+":
            return add(du, dv)
        if e.op == "-":
            return sub(du, dv)
        if e.op == "*":
            return add(mul(du, v), mul(u, dv))
        if e.op == "/":
            return div(sub(mul(du, v), mul(u, dv)), power(v, Number(2)))
        if var not in free_vars(v):
            lowered = Number(v.value - 1) if isinstance(v, Number) else sub(v, ONE)
            return mul(mul(v, power(u, lowered)), du)
        # u^v = exp(v log u)
        return mul(e, add(mul(dv, call("log", u)), div(mul(v, du), u)))
    if isinstance(e, Call):
        (u, *rest) = e.args
        du = diff(u, var)
        if e.name == "sin":
            return mul(call("cos", u), du)
        if e.name == "cos":
            return neg(mul(call("sin", u), du))
        if e.name == "exp":
            return mul(e, du)
        if e.name == "log":
            return div(du, u)
        if e.name == "sqrt":
            return div(du, mul(Number(2), e))
        raise NotDifferentiable(f"{e.name} is not differentiated symbolically")
    raise TypeError(type(e).__name__)


# ---------------------------------------------------------------------------
# Truncated power series


def _exact_or_complex(x):
    return simplify_scalar(x)


def _is_zero(x, scale=1.0) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, GaussQ):
        return x == 0
    return abs(x) <= 1e-12 * max(1.0, scale)


def _ser_const(c, n):
    return [c] + [Fraction(0)] * n


def _ser_mul(a, b, n):
    return [sum((a[j] * b[k - j] for j in range(k + 1)), Fraction(0)) for k in range(n + 1)]


def _valuation(a) -> int:
    scale = max((abs(complex(x)) for x in a), default=0.0)
    for k, x in enumerate(a):
        if not _is_zero(x, scale):
            return k
    return len(a)


def _ser_inv(d, n):
    d0 = d[0]
    out = [Fraction(1) / d0 if isinstance(d0, (int, Fraction)) else 1 / d0]
    for k in range(1, n + 1):
        s = sum((d[j] * out[k - j] for j in range(1, k + 1)), Fraction(0))
        out.append(-s / d0)
    return out


def _ser_exp(u, n):
    u0 = u[0]
    e0 = Fraction(1) if _is_zero_exact(u0) else cmath.exp(complex(u0))
    out = [e0]
    for k in range(1, n + 1):
        out.append(sum((j * u[j] * out[k - j] for j in range(1, k + 1)), Fraction(0)) / k)
    return out


def _is_zero_exact(x) -> bool:
    return isinstance(x, (int, Fraction, GaussQ)) and x == 0


def _ser_sincos(u, n):
    u0 = u[0]
    if _is_zero_exact(u0):
        s, c = [Fraction(0)], [Fraction(1)]
    else:
        s, c = [cmath.sin(complex(u0))], [cmath.cos(complex(u0))]
    for k in range(1, n + 1):
        s.append(sum((j * u[j] * c[k - j] for j in range(1, k + 1)), Fraction(0)) / k)
        c.append(-sum((j * u[j] * s[k - j] for j in range(1, k + 1)), Fraction(0)) / k)
    return s, c


def _ser_log(u, n):
    u0 = u[0]
    if _is_zero(u0):
        raise TaylorError("log has a branch point at the expansion center")
    out = [Fraction(0) if u0 == 1 else clog(complex(u0))]
    for k in range(1, n + 1):
        s = k * u[k] - sum((j * out[j] * u[k - j] for j in range(1, k)), Fraction(0))
        out.append(s / (k * u0))
    return out


def _ser_pow_const(u, alpha, n):
    """u^alpha for constant alpha with u[0] != 0 (J.C.P. Miller recurrence)."""
    u0 = u[0]
    if isinstance(alpha, Fraction) and alpha.denominator == 1 and isinstance(u0, (int, Fraction)):
        p0 = Fraction(u0) ** int(alpha)
    else:
        p0 = complex(u0) ** complex(alpha)
    out = [p0]
    for k in range(1, n + 1):
        s = sum((((alpha + 1) * j - k) * u[j] * out[k - j] for j in range(1, k + 1)), Fraction(0))
        out.append(s / (k * u0))
    return out


def _ser_compose(coeffs, w, n):
    """sum_k coeffs[k] * w^k for a series w with w[0] == 0 (Horner)."""
    out = _ser_const(coeffs[n], n)
    for k in range(n - 1, -1, -1):
        out = _ser_mul(out, w, n)
        out[0] = out[0] + coeffs[k]
    return out


def _series(e: Expr, var: str, center, n: int, binding) -> list:
    if var not in free_vars(e):
        return _ser_const(_const_value(e, binding), n)
    if isinstance(e, Var):
        return [center, Fraction(1)] + [Fraction(0)] * (n - 1) if n >= 1 else [center]
    if isinstance(e, Neg):
        return [-x for x in _series(e.arg, var, center, n, binding)]
    if isinstance(e, BinOp):
        if e.op in "+-":
            a = _series(e.left, var, center, n, binding)
            b = _series(e.right, var, center, n, binding)
            return [x + y if e.op == "+" else x - y for x, y in zip(a, b)]
        if e.op == "*":
            return _ser_mul(_series(e.left, var, center, n, binding),
                            _series(e.right, var, center, n, binding), n)
        if e.op == "/":
            den = _series(e.right, var, center, n, binding)
            v = _valuation(den)
            if v > n:
                raise TaylorError("denominator vanishes identically to the requested order")
            num_ = _series(e.left, var, center, n + v, binding)
            if v:
                den = _series(e.right, var, center, n + v, binding)
                scale = max(abs(complex(x)) for x in num_)
                if any(not _is_zero(x, scale) for x in num_[:v]):
                    raise TaylorError("pole at the expansion center")
                num_, den = num_[v:], den[v:]
            return _ser_mul(num_[: n + 1], _ser_inv(den[: n + 1], n), n)
        # power
        if var in free_vars(e.right):
            return _ser_exp(_series(BinOp("*", e.right, Call("log", (e.left,))), var, center, n, binding), n)
        alpha = _const_value(e.right, binding)
        base = _series(e.left, var, center, n, binding)
        if isinstance(alpha, Fraction) and alpha.denominator == 1 and alpha >= 0:
            out = _ser_const(Fraction(1), n)
            for _ in range(int(alpha)):
                out = _ser_mul(out, base, n)
            return out
        if _is_zero(base[0]):
            raise TaylorError("non-integer or negative power vanishes at the expansion center")
        return _ser_pow_const(base, alpha, n)
    if isinstance(e, Call):
        if e.name == "hzeta":
            if var in free_vars(e.args[0]):
                raise TaylorError("hzeta is expanded in its second argument only")
            s = complex(_const_value(e.args[0], binding)).real
            u = _series(e.args[1], var, center, n, binding)
            a0 = complex(u[0]).real
            binoms = binom_neg(s, n)
            coeffs = [binoms[k] * hurwitz_zeta(s + k, a0) for k in range(n + 1)]
            w = [Fraction(0)] + u[1:]
            return _ser_compose(coeffs, w, n)
        u = _series(e.args[0], var, center, n, binding)
        if e.name == "exp":
            return _ser_exp(u, n)
        if e.name in ("sin", "cos"):
            s, c = _ser_sincos(u, n)
            return s if e.name == "sin" else c
        if e.name == "log":
            return _ser_log(u, n)
        if e.name == "sqrt":
            if _is_zero(u[0]):
                raise TaylorError("sqrt has a branch point at the expansion center")
            return _ser_pow_const(u, Fraction(1, 2), n)
        raise TaylorError(f"{e.name} of the expansion variable is not supported")
    raise TypeError(type(e).__name__)


def taylor_coeffs(e: Expr | str, var: str, center=0, order: int = 10,
                  binding: Mapping[str, complex] | None = None) -> list:
    """Taylor coefficients c_0..c_order of ``e`` about ``center``.

    Exact inputs give ``Fraction`` coefficients. Removable singularities
    (``sin(x)/x`` at 0) are cancelled by series division.
    """
    if isinstance(e, str):
        e = parse(e)
    center = simplify_scalar(center) if not isinstance(center, (int, Fraction)) else Fraction(center)
    out = _series(e, var, center, order, binding or {})
    return [_exact_or_complex(c) for c in out[: order + 1]]


# ---------------------------------------------------------------------------
# Exponential-polynomial classification


def _const_value(e: Expr, binding=None):
    """Value of a variable-free subtree, exact when it is rational arithmetic."""
    exact = _exact_value(e)
    if exact is not None:
        return exact
    z = _ev(e, binding or {}, 1)
    return z.real if z.imag == 0 else z


def _exact_value(e: Expr):
    if isinstance(e, Number):
        return e.value
    if isinstance(e, Const) and e.name == "i":
        return GaussQ(0, 1)
    if isinstance(e, Neg):
        v = _exact_value(e.arg)
        return None if v is None else -v
    if isinstance(e, BinOp):
        a, b = _exact_value(e.left), _exact_value(e.right)
        if a is None or b is None:
            return None
        if e.op == "+":
            return simplify_scalar(a + b)
        if e.op == "-":
            return simplify_scalar(a - b)
        if e.op == "*":
            return simplify_scalar(a * b)
        if e.op == "/":
            return None if b == 0 else simplify_scalar(GaussQ.coerce(a) / GaussQ.coerce(b))
        if isinstance(b, Fraction) and b.denominator == 1 and (b >= 0 or a != 0):
            return simplify_scalar(GaussQ.coerce(a) ** int(b))
    return None


def _ep_add(a: dict, b: dict, sign=1) -> dict:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + sign * c
    return out


def _ep_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple((ra + rb, na + nb) for (ra, na), (rb, nb) in zip(ka, kb))
            out[k] = out.get(k, 0) + ca * cb
    return out


def exp_poly_terms(e: Expr, variables: tuple[str, ...]) -> dict:
    """Decompose into ``{((b_1, n_1), ..., (b_d, n_d)): c}`` meaning
    ``sum c * prod x_i^n_i exp(-b_i x_i)``. Rates may be any sign here."""
    zero_key = tuple((Fraction(0), 0) for _ in variables)
    fv = free_vars(e)
    if not fv & set(variables):
        if fv:
            raise NotExpPoly(f"unbound symbols {sorted(fv)}")
        return {zero_key: _const_value(e)}
    if isinstance(e, Var):
        k = list(zero_key)
        k[variables.index(e.name)] = (Fraction(0), 1)
        return {tuple(k): Fraction(1)}
    if isinstance(e, Neg):
        return {k: -c for k, c in exp_poly_terms(e.arg, variables).items()}
    if isinstance(e, BinOp):
        if e.op in "+-":
            return _ep_add(exp_poly_terms(e.left, variables), exp_poly_terms(e.right, variables),
                           1 if e.op == "+" else -1)
        if e.op == "*":
            return _ep_mul(exp_poly_terms(e.left, variables), exp_poly_terms(e.right, variables))
        if e.op == "/":
            if free_vars(e.right) & set(variables):
                raise NotExpPoly("division by a non-constant")
            d = _const_value(e.right)
            if d == 0:
                raise DomainError("division by zero")
            inv = GaussQ(1) / GaussQ.coerce(d) if GaussQ.coerce(d) is not None else 1 / d
            inv = simplify_scalar(inv)
            return {k: c * inv for k, c in exp_poly_terms(e.left, variables).items()}
        if free_vars(e.right) & set(variables):
            raise NotExpPoly("variable exponent")
        p = _const_value(e.right)
        if not (isinstance(p, Fraction) and p.denominator == 1 and p >= 0):
            raise NotExpPoly("only nonnegative integer powers are exp-polynomial")
        base = exp_poly_terms(e.left, variables)
        out = {zero_key: Fraction(1)}
        for _ in range(int(p)):
            out = _ep_mul(out, base)
        return out
    if isinstance(e, Call) and e.name == "exp":
        arg = exp_poly_terms(e.args[0], variables)
        out_key = list(zero_key)
        c0 = 0
        for k, c in arg.items():
            if any(r != 0 for r, _ in k):
                raise NotExpPoly("exponent is not affine")
            degs = [n for _, n in k]
            if sum(degs) == 0:
                c0 = c0 + c
            elif sum(degs) == 1:
                i = degs.index(1)
                c = simplify_scalar(c)
                if isinstance(c, (complex, GaussQ)):
                    raise NotExpPoly("oscillating exponential")
                rate = -c
                out_key[i] = (simplify_scalar(out_key[i][0] + rate), 0)
            else:
                raise NotExpPoly("exponent is not affine")
        pref = Fraction(1) if (GaussQ.coerce(c0) is not None and c0 == 0) else cmath.exp(complex(c0))
        return {tuple(out_key): simplify_scalar(pref)}
    raise NotExpPoly(f"{type(e).__name__} node is outside the exponential-polynomial class")


@dataclass(frozen=True)
class ExpPoly:
    """``sum_j c_j x^n_j exp(-b_j x)`` with ``b_j > 0``; terms sorted by (b, n)."""

    terms: tuple  # ((c, b, n), ...)

    @classmethod
    def from_terms(cls, terms) -> ExpPoly:
        acc: dict = {}
        for c, b, n in terms:
            key = (simplify_scalar(b), int(n))
            acc[key] = acc.get(key, 0) + c
        out = []
        for (b, n), c in acc.items():
            if _is_zero(c):
                continue
            if isinstance(b, complex) or b <= 0:
                raise NotExpPoly(f"decay rate {b} is not positive")
            out.append((simplify_scalar(c), b, n))
        out.sort(key=lambda t: (float(t[1]), t[2]))
        return cls(tuple(out))

    def __call__(self, x) -> complex:
        return sum(complex(c) * x**n * cmath.exp(-complex(b) * x) for c, b, n in self.terms)

    def __add__(self, other: ExpPoly) -> ExpPoly:
        return ExpPoly.from_terms(self.terms + other.terms)

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            return ExpPoly.from_terms(
                (c1 * c2, b1 + b2, n1 + n2) for c1, b1, n1 in self.terms for c2, b2, n2 in other.terms
            )
        return ExpPoly.from_terms((c * other, b, n) for c, b, n in self.terms)

    __rmul__ = __mul__

    def derivative(self) -> ExpPoly:
        out = []
        for c, b, n in self.terms:
            out.append((-b * c, b, n))
            if n:
                out.append((n * c, b, n - 1))
        return ExpPoly.from_terms(out)

    def integral(self):
        """Exact integral over [0, inf): sum c n! / b^(n+1)."""
        total = 0
        for c, b, n in self.terms:
            bb = GaussQ.coerce(b)
            denom = bb ** (n + 1) if bb is not None else b ** (n + 1)
            total = total + c * math.factorial(n) / denom
        return simplify_scalar(total)

    def scaled_argument(self, k) -> ExpPoly:
        """x -> k x."""
        return ExpPoly.from_terms((c * k**n, b * k, n) for c, b, n in self.terms)

    def to_expr(self, var: str = "x") -> Expr:
        out: Expr = ZERO
        x = Var(var)
        for c, b, n in self.terms:
            t = num(c)
            if n:
                t = mul(t, power(x, Number(n)))
            t = mul(t, call("exp", mul(neg(num(b)), x)))
            out = add(out, t)
        return out


def classify_exp_poly(e: Expr | str, var: str | None = None) -> ExpPoly:
    """Return the exponential-polynomial decomposition or raise NotExpPoly."""
    if isinstance(e, str):
        e = parse(e)
    fv = free_vars(e)
    if var is None:
        if len(fv) > 1:
            raise NotExpPoly(f"more than one variable: {sorted(fv)}")
        var = next(iter(fv)) if fv else "x"
    terms = exp_poly_terms(e, (var,))
    return ExpPoly.from_terms((c, k[0][0], k[0][1]) for k, c in terms.items())
