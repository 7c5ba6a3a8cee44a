"""Pseudo-differential operators ``f(-D)`` acting on kernels.

Three representations are used:

* ``ShiftSum``: an exact finite combination ``sum c_j exp(s_j D)``; each term
  acts as the shift ``k(x) -> k(x + s_j)``. Trigonometric and exponential
  polynomials ``f`` land here.
* ``SeriesOp``: truncated Taylor series of ``f`` applied through repeated
  derivatives, with a tail estimate.
* The Euler integral representation of inverse powers
  ``(a0 - a.D)^-mu = 1/Gamma(mu) int_0^inf exp(-a0 t) t^(mu-1) exp(t a.D) dt``,
  evaluated numerically along the ray ``b + t a``.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import expr as ex
from .exact import GaussQ, is_exact, simplify_scalar, sort_key
from .kernels import Kernel, KernelError, derivative_n, shift
from .oracle import QuadResult, quad_1d


class OperatorError(ValueError):
    pass


def _close(a, b) -> bool:
    if is_exact(a) and is_exact(b):
        return GaussQ.coerce(a) == GaussQ.coerce(b)
    return abs(complex(a) - complex(b)) <= 1e-12 * max(1.0, abs(complex(a)), abs(complex(b)))


def _zero(c) -> bool:
    return GaussQ.coerce(c) == 0 if is_exact(c) else c == 0


@dataclass(frozen=True)
class ShiftSum:
    """``sum coef * exp(shift * D)``; equal shifts merged, sorted by shift."""

    pairs: tuple = ()

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> ShiftSum:
        merged: list[list] = []
        for c, s in sorted(((simplify_scalar(c), simplify_scalar(s)) for c, s in pairs),
                           key=lambda p: sort_key(p[1])):
            for item in merged:
                if _close(item[1], s):
                    item[0] = simplify_scalar(item[0] + c)
                    break
            else:
                merged.append([c, s])
        return cls(tuple((c, s) for c, s in merged if not _zero(c)))

    @classmethod
    def identity(cls) -> ShiftSum:
        return cls(((Fraction(1), Fraction(0)),))

    @classmethod
    def shift_by(cls, a, coef=1) -> ShiftSum:
        return cls.from_pairs([(coef, a)])

    @classmethod
    def from_exponentials(cls, terms: Iterable) -> ShiftSum:
        """Operator ``f(-D)`` for ``f(t) = sum alpha * exp(beta t)``."""
        return cls.from_pairs((alpha, -simplify_scalar(beta)) for alpha, beta in terms)

    def __add__(self, other: ShiftSum) -> ShiftSum:
        return ShiftSum.from_pairs(self.pairs + other.pairs)

    def __neg__(self) -> ShiftSum:
        return self.scale(-1)

    def __sub__(self, other: ShiftSum) -> ShiftSum:
        return self + (-other)

    def scale(self, k) -> ShiftSum:
        return ShiftSum.from_pairs((c * k, s) for c, s in self.pairs)

    def compose(self, other: ShiftSum) -> ShiftSum:
        """Operator product; shifts commute so this is also the symbol product."""
        return ShiftSum.from_pairs((c1 * c2, s1 + s2) for c1, s1 in self.pairs for c2, s2 in other.pairs)

    __mul__ = compose

    def __pow__(self, n: int) -> ShiftSum:
        out = ShiftSum.identity()
        for _ in range(n):
            out = out.compose(self)
        return out

    @property
    def is_zero(self) -> bool:
        return not self.pairs

    def symbol(self, t) -> complex:
        """``f(t)``, the function whose operator ``f(-D)`` this is."""
        return sum(complex(c) * np.exp(-complex(s) * t) for c, s in self.pairs)

    def zero_order(self, max_order: int = 64) -> int:
        """Order of the zero of the symbol at t = 0 (moments of the shifts)."""
        for j in range(max_order + 1):
            moment = 0
            for c, s in self.pairs:
                moment = moment + c * (s**j if j else 1)
            if not (_zero(simplify_scalar(moment)) if is_exact(moment)
                    else abs(complex(moment)) <= 1e-12 * max(1.0, sum(abs(complex(c)) for c, _ in self.pairs))):
                return j
        return max_order + 1

    def apply(self, k: Kernel) -> Kernel:
        return apply_shift_sum(self, k)

    def __call__(self, k: Kernel) -> Kernel:
        return apply_shift_sum(self, k)

    def __str__(self):
        if not self.pairs:
            return "0"
        parts = []
        for c, s in self.pairs:
            parts.append(f"({ex.num(c)})*exp(({ex.num(s)})*D)")
        return " + ".join(parts)


def trig_power_expand(m: int, scale=Fraction(1, 2)) -> ShiftSum:
    """Shift sum for ``i * ((exp(scale D) - exp(-scale D)) / (2i))^m``, m odd.

    With ``m = 2n+1`` the result is
    ``(-1)^n / 2^m * sum_k binom(m, k) (-1)^k exp((m - 2k) scale D)``,
    whose coefficients are rational.
    """
    if m < 1 or m % 2 == 0:
        raise OperatorError("trig_power_expand needs an odd positive power")
    n = (m - 1) // 2
    scale = simplify_scalar(scale)
    lead = Fraction((-1) ** n, 2**m)
    return ShiftSum.from_pairs(
        (lead * math.comb(m, k) * (-1) ** k, (m - 2 * k) * scale) for k in range(m + 1)
    )


def apply_shift_sum(op: ShiftSum, k: Kernel) -> Kernel:
    terms = [replace(t, c=t.c * c) for c, s in op.pairs for t in shift(k, s).terms]
    return Kernel.from_terms(terms, k.var)


def exponential_sum(e: ex.Expr, var: str) -> dict:
    """Write ``e`` as ``{(beta, n): alpha}`` meaning
    ``sum alpha * var^n * exp(beta * var)``.

    Accepts sums, products, constant divisors and nonnegative integer powers
    of ``var``, ``exp``, ``sin`` and ``cos`` with arguments proportional to
    ``var``; raises OperatorError for anything else.
    """
    fv = ex.free_vars(e)
    if var not in fv:
        if fv:
            raise OperatorError(f"unbound symbols {sorted(fv)}")
        return {(Fraction(0), 0): ex._const_value(e)}
    if isinstance(e, ex.Var):
        return {(Fraction(0), 1): Fraction(1)}
    if isinstance(e, ex.Neg):
        return {k: simplify_scalar(-a) for k, a in exponential_sum(e.arg, var).items()}
    if isinstance(e, ex.BinOp):
        if e.op in "+-":
            out = exponential_sum(e.left, var)
            sign = 1 if e.op == "+" else -1
            for key, a in exponential_sum(e.right, var).items():
                out = _acc(out, key, sign * a)
            return out
        if e.op == "*":
            return _mul_sums(exponential_sum(e.left, var), exponential_sum(e.right, var))
        if e.op == "/" and var not in ex.free_vars(e.right):
            d = ex._const_value(e.right)
            inv = GaussQ(1) / GaussQ.coerce(d) if is_exact(d) else 1 / complex(d)
            return {k: simplify_scalar(a * inv) for k, a in exponential_sum(e.left, var).items()}
        if e.op == "^" and var not in ex.free_vars(e.right):
            p = ex._const_value(e.right)
            if isinstance(p, Fraction) and p.denominator == 1 and p >= 0:
                base = exponential_sum(e.left, var)
                out = {(Fraction(0), 0): Fraction(1)}
                for _ in range(int(p)):
                    out = _mul_sums(out, base)
                return out
    if isinstance(e, ex.Call) and e.name in ("exp", "sin", "cos"):
        rate = _affine_rate(e.args[0], var)
        if e.name == "exp":
            return {(rate, 0): Fraction(1)}
        ir = simplify_scalar(GaussQ(0, 1) * rate) if is_exact(rate) else 1j * rate
        half = Fraction(1, 2)
        if e.name == "cos":
            return _acc({(ir, 0): half}, (simplify_scalar(-ir), 0), half)
        c = GaussQ(0, -half)  # 1/(2i)
        return _acc({(ir, 0): c}, (simplify_scalar(-ir), 0), -c)
    raise OperatorError(f"{ex.to_string(e)} is not an exponential polynomial in {var}")


def _mul_sums(x: dict, y: dict) -> dict:
    out: dict = {}
    for (b1, n1), a1 in x.items():
        for (b2, n2), a2 in y.items():
            out = _acc(out, (simplify_scalar(b1 + b2), n1 + n2), a1 * a2)
    return out


def _acc(d: dict, key, a) -> dict:
    b, n = simplify_scalar(key[0]), key[1]
    out = dict(d)
    for k in out:
        if k[1] == n and _close(k[0], b):
            out[k] = simplify_scalar(out[k] + a)
            return out
    out[(b, n)] = simplify_scalar(a)
    return out


def _affine_rate(arg: ex.Expr, var: str):
    """Coefficient r of ``arg = r * var``; anything else is rejected."""
    try:
        terms = ex.exp_poly_terms(arg, (var,))
    except ex.NotExpPoly as err:
        raise OperatorError(str(err)) from None
    rate = 0
    for key, c in terms.items():
        b, n = key[0]
        if b != 0 or n > 1 or (n == 0 and not _zero(c)):
            raise OperatorError("exponent must be a constant multiple of the variable")
        if n == 1:
            rate = c
    return simplify_scalar(rate)


def shift_sum_for(e: ex.Expr | str, var: str) -> ShiftSum:
    """The ShiftSum of ``f(-D)`` for a trig/exponential polynomial ``f``."""
    if isinstance(e, str):
        e = ex.parse(e)
    terms = exponential_sum(e, var)
    if any(n for _, n in terms):
        raise OperatorError("polynomial factors have no shift-sum form")
    return ShiftSum.from_exponentials((a, b) for (b, _), a in terms.items() if not _zero(a))


# ---------------------------------------------------------------------------
# truncated series


@dataclass(frozen=True)
class SeriesOp:
    """``sum_{j<=N} c_j t^j`` applied as ``sum c_j (-D)^j`` (or ``(+D)^j``).

    ``extra`` holds the next few coefficients, used only for the tail estimate.
    """

    coeffs: tuple
    negate: bool = True
    extra: tuple = ()

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_expr(cls, e: ex.Expr | str, var: str, order: int = 40, negate: bool = True, extra: int = 6) -> SeriesOp:
        if order < 0:
            raise OperatorError("order must be nonnegative")
        cs = ex.taylor_coeffs(e, var, 0, order + extra)
        return cls(tuple(cs[: order + 1]), negate, tuple(cs[order + 1:]))

    def __str__(self):
        d = "(-D)" if self.negate else "D"
        return " + ".join(f"({ex.num(c)})*{d}^{j}" for j, c in enumerate(self.coeffs) if not _zero(c)) or "0"


def apply_series(op: SeriesOp, k: Kernel, at=None) -> tuple[Kernel, float]:
    """Apply the truncated series; the tail estimate is computed at ``at``.

    The estimate sums the next coefficients times the matching derivatives of
    ``k`` at ``at`` and adds a geometric remainder from the ratio of the last
    two nonzero terms, then doubles the result and adds a rounding allowance.
    Without ``at`` it is ``nan``.
    """
    if k.has_heaviside:
        raise KernelError("series operators do not act on Heaviside kernels")
    out = Kernel((), k.var)
    d = k
    sign = -1 if op.negate else 1
    magnitude = 0.0
    for j, c in enumerate(op.coeffs):
        if j:
            d = derivative_n(d, 1)
        if not _zero(c):
            out = out + d.scale(c * sign**j)
            if at is not None:
                magnitude += abs(complex(c)) * abs(d.evaluate(at))
    if at is None:
        return out, float("nan")
    tail_terms = []
    for c in op.extra:
        d = derivative_n(d, 1)
        tail_terms.append(abs(complex(c)) * abs(d.evaluate(at)))
    nonzero = [t for t in tail_terms if t > 0]
    tail = sum(tail_terms)
    if len(nonzero) >= 2:
        gap = _gap(tail_terms)
        r = (nonzero[-1] / nonzero[-2]) if nonzero[-2] else math.inf
        if r >= 1:
            tail = math.inf
        else:
            tail += nonzero[-1] * r / (1 - r) * gap
    # rounding in the evaluated sum
    rounding = 4 * sys.float_info.epsilon * (magnitude + len(op.coeffs) * abs(out.evaluate(at)))
    return out, 2.0 * tail + rounding


def _gap(terms: list[float]) -> int:
    idx = [i for i, t in enumerate(terms) if t > 0]
    return max(1, idx[-1] - idx[-2]) if len(idx) >= 2 else 1


# ---------------------------------------------------------------------------
# Euler integral representation


def inverse_power_apply(
    mu: float,
    direction: Sequence[float],
    a0: float,
    base: Callable[[np.ndarray], float],
    b: Sequence[float],
    tol: float = 1e-10,
) -> QuadResult:
    """``(a0 - a.D_b)^(-mu)`` applied to ``base`` at the point ``b``.

    Computed as ``1/Gamma(mu) int_0^inf exp(-a0 t) t^(mu-1) base(b + t a) dt``
    by adaptive quadrature after mapping ``[0, inf)`` onto ``[0, 1)``. A
    quadrature that does not reach ``tol`` is reported as not converged.
    """
    if mu <= 0:
        raise OperatorError("mu must be positive")
    a = np.asarray(direction, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise OperatorError("direction and base point differ in dimension")
    g = math.gamma(mu)

    def integrand(t):
        if t == 0 and mu < 1:
            return 0.0
        return math.exp(-a0 * t) * t ** (mu - 1) * base(b + t * a) / g

    return quad_1d(integrand, 0.0, math.inf, tol=tol)


def prop1_factorizations(f: ShiftSum, g: ShiftSum, k: Kernel) -> tuple[Kernel, Kernel, Kernel]:
    """``f(g(k))``, ``g(f(k))`` and ``(fg)(k)``, which must coincide."""
    return apply_shift_sum(f, apply_shift_sum(g, k)), apply_shift_sum(g, apply_shift_sum(f, k)), \
        apply_shift_sum(f.compose(g), k)
