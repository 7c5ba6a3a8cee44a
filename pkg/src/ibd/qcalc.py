"""q-calculus: q-integers, the q-derivative, the q-exponential, Jackson
integrals, the q-analogue of integration by differentiation and the Jackson
integral of the Hurwitz zeta function over [0, 1].

Rational ``q`` (``Fraction``) keeps q-integers and q-factorials exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import expr as ex
from .oracle import euler_transform, richardson_limit
from .special import DomainError, binom_neg, hurwitz_zeta, riemann_zeta

__all__ = [
    "QContext", "QSeriesDivergence", "JacksonResult", "KurokawaReport",
    "q_int", "q_factorial", "Dq", "eq_series", "eq_product", "jackson_integral",
    "jackson_antiderivative", "q_ibd_eval", "hurwitz_zeta", "riemann_zeta", "kurokawa_check",
]


class QSeriesDivergence(ArithmeticError):
    """A q-series or Jackson sum failed to settle before its term cap."""


@dataclass(frozen=True)
class QContext:
    q: float | Fraction
    tol: float = 1e-16
    max_terms: int = 200_000
    max_zeta_terms: int = 400

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")
        if self.tol <= 0 or self.max_terms <= 0 or self.max_zeta_terms <= 0:
            raise ValueError("tolerances and caps must be positive")

    @property
    def qf(self) -> float:
        return float(self.q)


def _ctx(ctx) -> QContext:
    return ctx if isinstance(ctx, QContext) else QContext(ctx)


def q_int(j, ctx) -> float | Fraction:
    """``[j]_q = (1 - q^j) / (1 - q)``; exact for rational q and integer j."""
    q = _ctx(ctx).q
    if isinstance(j, int) and isinstance(q, (int, Fraction)):
        q = Fraction(q)
        return (1 - q**j) / (1 - q)
    q = float(q)
    return (1.0 - q ** float(j)) / (1.0 - q)


def q_factorial(j: int, ctx) -> float | Fraction:
    if j < 0:
        raise ValueError("q_factorial needs j >= 0")
    out = Fraction(1) if isinstance(_ctx(ctx).q, (int, Fraction)) else 1.0
    for k in range(1, j + 1):
        out = out * q_int(k, ctx)
    return out


def _callable(f, var: str | None = None) -> Callable[[float], float]:
    if callable(f) and not isinstance(f, ex.Expr):
        return f
    e = ex.parse(f) if isinstance(f, str) else f
    fv = ex.free_vars(e)
    if len(fv) > 1:
        raise ValueError("function must depend on one variable")
    name = var or (next(iter(fv)) if fv else "x")
    return lambda x: ex.evaluate(e, {name: x}).real


def Dq(f, x: float, ctx) -> float:
    """``(f(qx) - f(x)) / ((q - 1) x)``; at ``x = 0`` the first Taylor
    coefficient of an expression is returned."""
    c = _ctx(ctx)
    if x == 0:
        if callable(f) and not isinstance(f, ex.Expr):
            raise ValueError("D_q at 0 needs an expression (its Taylor coefficient)")
        e = ex.parse(f) if isinstance(f, str) else f
        fv = ex.free_vars(e)
        var = next(iter(fv)) if fv else "x"
        return float(ex.taylor_coeffs(e, var, 0, 1)[1])
    g = _callable(f)
    q = c.qf
    return (g(q * x) - g(x)) / ((q - 1.0) * x)


def eq_series(x: float, ctx) -> float:
    """``sum x^j / [j]!_q``; stops once a term falls below ``tol`` times the sum."""
    c = _ctx(ctx)
    q = c.qf
    total, term, j = 1.0, 1.0, 0
    small = 0
    while j < c.max_terms:
        j += 1
        term *= x / ((1.0 - q**j) / (1.0 - q))
        total += term
        if abs(term) <= c.tol * max(1.0, abs(total)):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
        if not math.isfinite(total):
            break
    raise QSeriesDivergence(f"e_q series did not settle for x={x}, q={q}")


def eq_product(x: float, ctx, start: int = 0) -> float:
    """``prod_{n >= start} 1 / (1 - x (1 - q) q^n)``.

    ``start=0`` is the product that equals the series; ``start=1`` drops the
    first factor.
    """
    c = _ctx(ctx)
    q = c.qf
    out = 1.0
    n = start
    while n < start + c.max_terms:
        f = x * (1.0 - q) * q**n
        if f == 1.0:
            raise DomainError("a factor of the product vanishes")
        out /= 1.0 - f
        if abs(f) <= c.tol:
            return out
        n += 1
    raise QSeriesDivergence("e_q product did not settle")


@dataclass(frozen=True)
class JacksonResult:
    value: float
    truncation_error: float
    terms: int

    def __float__(self):
        return float(self.value)


def _jackson_0b(f: Callable, b: float, c: QContext) -> JacksonResult:
    """``(1 - q) b sum_{n >= 0} q^n f(q^n b)``."""
    if b == 0:
        return JacksonResult(0.0, 0.0, 0)
    q = c.qf
    terms = []
    running = 0.0
    qn = 1.0
    small = 0
    for n in range(c.max_terms):
        t = qn * f(qn * b)
        terms.append(t)
        running += t
        if abs(t) <= c.tol * max(1.0, abs(running)):
            small += 1
            if small >= 3:
                return JacksonResult((1 - q) * b * math.fsum(terms), abs((1 - q) * b * t) * q / (1 - q), n + 1)
        else:
            small = 0
        qn *= q
        if qn == 0.0:
            break
    s = math.fsum(terms) if terms else 0.0
    last = abs(terms[-1]) if terms else math.inf
    if len(terms) > 1 and last < abs(terms[-2]) and last <= 1e-8 * max(1.0, abs(s)):
        return JacksonResult((1 - q) * b * s, abs((1 - q) * b * last) * q / (1 - q), len(terms))
    raise QSeriesDivergence("Jackson sum did not settle before the term cap")


def jackson_integral(f, a: float, b: float, ctx) -> JacksonResult:
    """Jackson integral of ``f`` over ``[a, b]`` (``0 <= a``, ``b`` may be inf).

    Finite ends use ``(1-q) b sum q^n f(q^n b)`` and the difference of two
    such sums. ``b = inf`` with ``a = 0`` uses the two-sided sum
    ``(1-q) sum_{n in Z} q^n f(q^n)``.
    """
    c = _ctx(ctx)
    g = _callable(f)
    if a < 0 or b < 0:
        raise ValueError("Jackson integrals here need nonnegative endpoints")
    if math.isinf(b):
        if a != 0:
            raise ValueError("semi-infinite Jackson integral starts at 0")
        return _jackson_0inf(g, c)
    rb = _jackson_0b(g, b, c)
    ra = _jackson_0b(g, a, c)
    return JacksonResult(rb.value - ra.value, rb.truncation_error + ra.truncation_error, rb.terms + ra.terms)


def _jackson_0inf(g: Callable, c: QContext) -> JacksonResult:
    q = c.qf
    lower = _jackson_0b(g, 1.0, c)
    terms = []
    for n in range(1, c.max_terms):
        x = q**-n
        if not math.isfinite(x):
            break
        t = x * g(x)
        terms.append(t)
        if abs(t) <= c.tol * max(1.0, abs(sum(terms[-8:]))) and n > 3:
            s = (1 - q) * math.fsum(terms)
            return JacksonResult(lower.value + s, lower.truncation_error + abs((1 - q) * t), lower.terms + n)
    raise QSeriesDivergence("upper Jackson tail did not settle")


def jackson_antiderivative(f, ctx) -> Callable[[float], float]:
    """``x -> int_0^x f d_q t``."""
    c = _ctx(ctx)
    g = _callable(f)
    return lambda x: _jackson_0b(g, x, c).value


def q_ibd_eval(f, a: float, b: float, ctx, var: str | None = None, max_order: int = 320) -> float:
    """``sum_k c_k (b^(k+1) - a^(k+1)) / [k+1]_q`` with ``c_k`` the Taylor
    coefficients of ``f`` at 0; the limit of ``f(D_q)`` acting on
    ``(e_q(by) - e_q(ay)) / y``.
    """
    c = _ctx(ctx)
    e = ex.parse(f) if isinstance(f, str) else f
    if var is None:
        fv = ex.free_vars(e)
        var = next(iter(fv)) if fv else "x"
    q = c.qf
    order = 40
    while order <= max_order:
        coeffs = ex.taylor_coeffs(e, var, 0, order)
        terms = []
        for k, ck in enumerate(coeffs):
            ck = complex(ck).real
            qk = (1.0 - q ** (k + 1)) / (1.0 - q)
            terms.append(ck * (b ** (k + 1) - a ** (k + 1)) / qk)
        total = math.fsum(terms)
        tail = max(abs(t) for t in terms[-4:])
        if tail <= 1e-17 * max(1.0, abs(total)):
            return total
        order *= 2
    raise QSeriesDivergence("Taylor series did not converge on [a, b]")


# ---------------------------------------------------------------------------
# Jackson integral of the Hurwitz zeta function


@dataclass(frozen=True)
class KurokawaReport:
    s: float
    q: float
    formal_term: float        # 1/[1-s]_q
    formal: bool              # True when the Jackson sum of a^-s diverges
    jackson_part: float       # Jackson integral of zeta(s, 1+a) over [0, 1]
    series_value: float       # sum binom(-s,k) zeta(s+k) / [k+1]_q, summed
    mode: str                 # "classical", "accelerated" or "euler"
    raw_converged: bool
    raw_divergent: bool
    raw_last_term: float
    euler_metric: float
    abel_value: float
    direct_lhs: float | None  # Jackson sum of zeta(s, a) itself when it converges

    @property
    def lhs(self) -> float:
        return self.formal_term + self.jackson_part

    @property
    def rhs(self) -> float:
        return self.formal_term + self.series_value

    @property
    def note(self) -> str:
        parts = []
        if self.formal:
            parts.append("1/[1-s]_q is a formal antiderivative value (the Jackson sum of a^-s diverges)")
        if self.mode == "euler":
            parts.append(
                f"Euler-accelerated rhs: raw partial sums do not converge (last term {self.raw_last_term:.3e}); "
                f"Euler sum of the k-series {self.series_value:.15g}, Abel cross-check {self.abel_value:.15g}"
            )
        elif self.mode == "accelerated":
            parts.append("convergent rhs series summed with Euler acceleration")
        else:
            parts.append("rhs summed classically")
        return "; ".join(parts)

    @property
    def regularized(self) -> bool:
        return self.formal or self.raw_divergent


def _zeta_fast(x: float) -> float:
    if x > 40:
        return 1.0 + 2.0**-x + 3.0**-x + 4.0**-x
    return riemann_zeta(x)


def _kurokawa_terms(s: float, q: float, count: int) -> list[float]:
    binoms = binom_neg(s, count - 1)
    out = []
    for k in range(count):
        qk = (1.0 - q ** (k + 1)) / (1.0 - q)
        if s + k == 1:
            # binom(-s, k) has a simple zero against the zeta pole; keep the residue
            prod = 1.0
            for j in range(k - 1):
                prod *= s + j
            out.append((-1) ** k * prod / math.factorial(k) / qk)
        elif binoms[k] == 0:
            out.append(0.0)
        else:
            out.append(binoms[k] * _zeta_fast(s + k) / qk)
    return out


def _abel_sum(terms_fn: Callable[[int], list[float]], eps0: float = 0.5, levels: int = 8) -> float:
    def g(eps):
        x = 1.0 - eps
        count = int(45.0 / eps) + 50
        terms = terms_fn(count)
        return math.fsum(t * x**k for k, t in enumerate(terms))

    return richardson_limit(g, eps0, levels=levels)[0]


def kurokawa_check(s: float, ctx) -> KurokawaReport:
    """Both sides of
    ``int_0^1 zeta(s,a) d_q a = 1/[1-s]_q + sum_k binom(-s,k) zeta(s+k)/[k+1]_q``.

    The left side is ``1/[1-s]_q`` plus the Jackson sum of ``zeta(s, 1+a)``.
    The right-hand series is summed classically when its partial sums
    settle; otherwise with the Euler transform, and Abel summation
    (``x -> 1-`` with Richardson extrapolation) serves as a cross-check.
    """
    if s == 1:
        raise DomainError("s = 1 is the zeta pole")
    c = _ctx(ctx)
    q = c.qf
    formal_term = (1.0 - q) / (1.0 - q ** (1.0 - s))
    formal = s > 1
    jack = _jackson_0b(lambda a: hurwitz_zeta(s, 1.0 + a), 1.0, c).value
    direct = None
    if s < 1:
        direct = _jackson_0b(lambda a: hurwitz_zeta(s, a), 1.0, QContext(c.q, 1e-17, c.max_terms)).value

    count = c.max_zeta_terms
    terms = _kurokawa_terms(s, q, count)
    partial = []
    acc = 0.0
    for t in terms:
        acc += t
        partial.append(acc)
    raw_last = abs(terms[-1])
    raw_converged = raw_last <= 1e-12 * max(1.0, abs(partial[-1]))
    # terms that fail to shrink between the middle and the end of the window
    raw_divergent = not raw_converged and raw_last >= abs(terms[count // 2]) * 0.999
    # 64 partial sums are plenty for iterated averaging of the alternating tail
    value, metric = euler_transform(partial[:64])
    if raw_converged:
        mode, value = "classical", math.fsum(terms)
    else:
        mode = "euler" if raw_divergent else "accelerated"
    if not raw_converged and metric > 1e-8 * max(1.0, abs(value)):
        raise QSeriesDivergence(f"Euler transform did not stabilize (metric {metric:.3e})")
    abel = _abel_sum(lambda n: _kurokawa_terms(s, q, n))
    return KurokawaReport(
        s=s, q=q, formal_term=formal_term, formal=formal, jackson_part=jack,
        series_value=float(value), mode=mode, raw_converged=raw_converged, raw_divergent=raw_divergent,
        raw_last_term=raw_last, euler_metric=metric, abel_value=abel, direct_lhs=direct,
    )
