"""Closed-form kernels on which pseudo-differential operators act exactly.

A kernel is a finite sum of terms

    c * (x + s)^m * log(x + s)^l * exp(w x) * H(x + h)

with ``l`` in {0, 1} and the Heaviside factor optional. The family is closed
under shifts, derivatives (Heaviside-free terms), the antiderivatives the
method needs, and limits at ``x -> 0+``. Exact inputs (ints, Fractions,
Gaussian rationals) stay exact through every operation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

from . import expr as ex
from .exact import ExactValue, GaussQ, PiMonomial, exact_exp, gamma_exact, is_exact, simplify_scalar, sort_key

_FLOAT_TOL = 1e-12


class KernelError(ValueError):
    pass


class OutsideClosure(KernelError):
    """Antiderivative would leave the kernel family."""


class Diverges:
    """Marker returned by :func:`limit_at_zero` for an infinite limit."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "DIVERGES"


DIVERGES = Diverges()


def _close(a, b) -> bool:
    if a is None or b is None:
        return a is b
    if is_exact(a) and is_exact(b):
        return GaussQ.coerce(a) == GaussQ.coerce(b)
    za, zb = complex(a), complex(b)
    return abs(za - zb) <= _FLOAT_TOL * max(1.0, abs(za), abs(zb))


def _is_zero(c) -> bool:
    if is_exact(c):
        return GaussQ.coerce(c) == 0
    return abs(complex(c)) <= 1e-300


@dataclass(frozen=True)
class KernelTerm:
    c: object = Fraction(1)
    s: object = Fraction(0)
    m: int = 0
    l: int = 0
    w: object = Fraction(0)
    h: object = None
    branch: int = 0

    def __post_init__(self):
        for name in ("c", "s", "w"):
            object.__setattr__(self, name, simplify_scalar(getattr(self, name)))
        if self.h is not None:
            h = simplify_scalar(self.h)
            if isinstance(h, (complex, GaussQ)):
                raise KernelError("Heaviside threshold must be real")
            object.__setattr__(self, "h", h)
        if self.l not in (0, 1):
            raise KernelError("log power must be 0 or 1")
        if self.m == 0 and self.l == 0:
            # the shift only matters through (x+s)^m and log(x+s)
            object.__setattr__(self, "s", Fraction(0))

    def key(self):
        hkey = (0, 0.0) if self.h is None else (1, float(self.h))
        return (sort_key(self.s), self.m, self.l, sort_key(self.w), hkey, self.branch)

    def same_shape(self, o: KernelTerm) -> bool:
        return (self.m == o.m and self.l == o.l and self.branch == o.branch
                and _close(self.s, o.s) and _close(self.w, o.w) and _close(self.h, o.h))

    def evaluate(self, x, h0=1) -> complex:
        z = complex(x) + complex(self.s)
        val = complex(self.c)
        if self.m:
            if z == 0:
                raise ZeroDivisionError("kernel pole")
            val *= z**self.m
        if self.l:
            val *= cmath.log(z) + 2j * math.pi * self.branch
        if self.w != 0:
            val *= cmath.exp(complex(self.w) * complex(x))
        if self.h is not None:
            t = complex(x).real + float(self.h)
            val *= 1.0 if t > 0 else (0.0 if t < 0 else float(h0))
        return val


@dataclass(frozen=True)
class Kernel:
    terms: tuple = ()
    var: str = "x"

    @classmethod
    def from_terms(cls, terms: Iterable[KernelTerm], var: str = "x") -> Kernel:
        exact: dict = {}
        loose: list[KernelTerm] = []
        for t in terms:
            if is_exact(t.s) and is_exact(t.w) and (t.h is None or is_exact(t.h)):
                k = (t.s, t.m, t.l, t.w, t.h, t.branch)
                if k in exact:
                    exact[k] = replace(exact[k], c=exact[k].c + t.c)
                    continue
                # a float term may already sit within tolerance of this shape
                for i, u in enumerate(loose):
                    if u.same_shape(t):
                        loose[i] = replace(u, c=u.c + t.c)
                        break
                else:
                    exact[k] = t
                continue
            for key, u in exact.items():
                if u.same_shape(t):
                    exact[key] = replace(u, c=u.c + t.c)
                    break
            else:
                for i, u in enumerate(loose):
                    if u.same_shape(t):
                        loose[i] = replace(u, c=u.c + t.c)
                        break
                else:
                    loose.append(t)
        merged = sorted([*exact.values(), *loose], key=KernelTerm.key)
        return cls(tuple(t for t in merged if not _is_zero(t.c)), var)

    def __eq__(self, other):
        """Exact on exact fields, 1e-12 relative on float fields."""
        if not isinstance(other, Kernel):
            return NotImplemented
        return (self.var == other.var and len(self.terms) == len(other.terms)
                and all(a.same_shape(b) and _close(a.c, b.c) for a, b in zip(self.terms, other.terms)))

    def __hash__(self):
        return hash((self.var, tuple((t.m, t.l, t.h is None) for t in self.terms)))

    # algebra -------------------------------------------------------------
    def __add__(self, other: Kernel) -> Kernel:
        return Kernel.from_terms(self.terms + other.terms, self.var)

    def __neg__(self) -> Kernel:
        return self.scale(-1)

    def __sub__(self, other: Kernel) -> Kernel:
        return self + (-other)

    def scale(self, k) -> Kernel:
        return Kernel.from_terms((replace(t, c=t.c * k) for t in self.terms), self.var)

    __mul__ = scale
    __rmul__ = scale

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def has_heaviside(self) -> bool:
        return any(t.h is not None for t in self.terms)

    @property
    def is_exact(self) -> bool:
        return all(is_exact(t.c) and is_exact(t.s) and is_exact(t.w)
                   and (t.h is None or is_exact(t.h)) for t in self.terms)

    def evaluate(self, x, h0=1) -> complex:
        return sum((t.evaluate(x, h0) for t in self.terms), 0j)

    __call__ = evaluate

    def evaluate_exact(self, x, h0=Fraction(1)):
        """Exact value for log- and exponential-free kernels at an exact point."""
        xg = GaussQ.coerce(x)
        if xg is None or not self.is_exact:
            raise KernelError("exact evaluation needs exact kernel and point")
        total = GaussQ()
        for t in self.terms:
            if t.l or t.w != 0:
                raise KernelError("exact evaluation excludes log and exponential factors")
            v = GaussQ.coerce(t.c)
            if t.m:
                v = v * (xg + t.s) ** t.m
            if t.h is not None:
                if not xg.is_real:
                    raise KernelError("Heaviside at a complex point")
                arg = xg.re + Fraction(t.h)
                v = v * (1 if arg > 0 else (0 if arg < 0 else h0))
            total = total + v
        return simplify_scalar(total)

    # printing --------------------------------------------------------------
    def to_expr(self) -> ex.Expr:
        x = ex.Var(self.var)
        out: ex.Expr = ex.ZERO
        for t in self.terms:
            base = ex.add(x, ex.num(t.s))
            z = complex(t.c)
            negative = z.real < 0 or (z.real == 0 and z.imag < 0)
            piece = ex.num(-t.c if negative else t.c)
            if t.m:
                piece = ex.mul(piece, ex.power(base, ex.Number(t.m)))
            if t.l:
                lg = ex.call("log", base)
                if t.branch:
                    lg = ex.add(lg, ex.mul(ex.Number(2 * t.branch), ex.mul(ex.Const("pi"), ex.Const("i"))))
                piece = ex.mul(piece, lg)
            if t.w != 0:
                piece = ex.mul(piece, ex.call("exp", ex.mul(ex.num(t.w), x)))
            if t.h is not None:
                piece = ex.mul(piece, ex.call("H", ex.add(x, ex.num(t.h))))
            if negative:
                out = ex.sub(out, piece)
            else:
                out = ex.add(out, piece)
        return out

    def __str__(self):
        return str(self.to_expr())


# ---------------------------------------------------------------------------
# constructors


def power_kernel(m: int, c=1, s=0, var: str = "x") -> Kernel:
    return Kernel.from_terms([KernelTerm(c=c, s=s, m=m)], var)


def log_kernel(c=1, s=0, var: str = "x") -> Kernel:
    return Kernel.from_terms([KernelTerm(c=c, s=s, l=1)], var)


def exp_kernel(w, c=1, var: str = "x") -> Kernel:
    return Kernel.from_terms([KernelTerm(c=c, w=w)], var)


def heaviside_kernel(h=0, c=1, var: str = "x") -> Kernel:
    return Kernel.from_terms([KernelTerm(c=c, h=h)], var)


def radial_constant(n: int) -> PiMonomial:
    """Integral of exp(-|y|) over R^n: 2 pi^(n/2) Gamma(n) / Gamma(n/2)."""
    return PiMonomial(2, Fraction(n, 2)) * gamma_exact(n) / gamma_exact(Fraction(n, 2))


def elementary_laplace_kernel(domain, var: str = "x"):
    """Closed form of the integral of exp(-x y) over ``domain``.

    ``domain`` is ``"semi_infinite"``, ``("interval", a, b)``,
    ``("orthant", n)`` or ``("radial", n)``. The orthant kernel is separable
    and comes back as a tuple of n factors ``1/x_i`` named ``var1..varn``.
    """
    if domain == "semi_infinite":
        return power_kernel(-1, var=var)
    kind, *args = domain
    if kind == "interval":
        a, b = args
        if not a < b:
            raise KernelError("interval needs a < b")
        return Kernel.from_terms(
            [KernelTerm(c=1, m=-1, w=-simplify_scalar(a)), KernelTerm(c=-1, m=-1, w=-simplify_scalar(b))], var
        )
    if kind == "orthant":
        (n,) = args
        return tuple(power_kernel(-1, var=f"{var}{i + 1}") for i in range(n))
    if kind == "radial":
        (n,) = args
        const = radial_constant(n)
        c = const.coef if const.power == 0 else float(const)
        return power_kernel(-n, c=c, var=var)
    raise KernelError(f"unknown domain {domain!r}")


# ---------------------------------------------------------------------------
# operations


def shift(k: Kernel, a) -> Kernel:
    """k(x + a)."""
    a = simplify_scalar(a)
    out = []
    for t in k.terms:
        out.append(replace(
            t,
            c=t.c * exact_exp(t.w, a),
            s=t.s + a,
            h=None if t.h is None else t.h + a,
        ))
    return Kernel.from_terms(out, k.var)


def _d1(t: KernelTerm) -> list[KernelTerm]:
    if t.h is not None:
        raise KernelError("Heaviside terms are not differentiated")
    out = []
    if t.w != 0:
        out.append(replace(t, c=t.c * t.w))
    if t.m:
        out.append(replace(t, c=t.c * t.m, m=t.m - 1))
    if t.l:
        out.append(replace(t, m=t.m - 1, l=0, branch=0))
    return out


def derivative_n(k: Kernel, order: int) -> Kernel:
    if order < 0:
        raise ValueError("order must be nonnegative")
    if k.has_heaviside:
        raise KernelError("Heaviside terms are not differentiated")
    for _ in range(order):
        k = Kernel.from_terms([u for t in k.terms for u in _d1(t)], k.var)
    return k


def _anti(t: KernelTerm) -> list[KernelTerm]:
    if t.h is not None:
        raise OutsideClosure("Heaviside terms have no antiderivative in the family")
    if t.w == 0:
        if t.l == 0:
            if t.m == -1:
                return [replace(t, m=0, l=1)]
            return [replace(t, c=t.c * Fraction(1, t.m + 1), m=t.m + 1)]
        if t.m == -1:
            raise OutsideClosure("log(x)^2 / 2 is outside the family")
        k = t.m + 1
        return [replace(t, c=t.c * Fraction(1, k), m=k),
                replace(t, c=-t.c * Fraction(1, k * k), m=k, l=0, branch=0)]
    if t.l == 0 and t.m >= 0:
        inv_w = GaussQ(1) / GaussQ.coerce(t.w) if is_exact(t.w) else 1 / complex(t.w)
        first = replace(t, c=t.c * inv_w)
        if t.m == 0:
            return [first]
        rest = _anti(replace(t, c=-t.c * t.m * inv_w, m=t.m - 1))
        return [first] + rest
    raise OutsideClosure("term is outside the antiderivative closure")


def antiderivative(k: Kernel) -> Kernel:
    """Antiderivative with the integration constant fixed to zero."""
    return Kernel.from_terms([u for t in k.terms for u in _anti(t)], k.var)


def _scalar_log(s, branch: int):
    ev = ExactValue.log_of(s)
    if ev is not None:
        return ev + ExactValue.build(pi=GaussQ(0, 2 * branch)) if branch else ev
    return cmath.log(complex(s)) + 2j * math.pi * branch


def limit_at_zero(k: Kernel):
    """Limit of the kernel as x -> 0+.

    Terms with a nonzero shift are evaluated at 0 and Heaviside factors take
    their right limit. Terms anchored at 0 are expanded in Laurent-log form:
    every coefficient of ``x^j`` with ``j < 0`` and of ``log(x)`` must cancel
    exactly (or to 1e-12 relative for floats), otherwise :data:`DIVERGES` is
    returned. The result is an :class:`ExactValue` when everything involved is
    exact, else complex.
    """
    exact_acc = ExactValue()
    float_acc = 0j

    def add(v):
        nonlocal exact_acc, float_acc
        if isinstance(v, ExactValue) or is_exact(v):
            exact_acc = exact_acc + v
        else:
            float_acc += complex(v)

    coeffs: dict[tuple[int, int], object] = {}
    mags: dict[tuple[int, int], float] = {}

    def collect(key, v):
        coeffs[key] = coeffs.get(key, 0) + v
        mags[key] = mags.get(key, 0.0) + abs(complex(v))

    for t in k.terms:
        if t.h is not None and float(t.h) < 0:
            continue
        if not _is_zero(t.s):
            val = t.c * (GaussQ.coerce(t.s) ** t.m if is_exact(t.s) else complex(t.s) ** t.m)
            if t.l:
                lg = _scalar_log(t.s, t.branch)
                if isinstance(lg, ExactValue) and is_exact(val):
                    add(lg.scale(val))
                else:
                    add(complex(val) * complex(lg))
            else:
                add(val)
            continue
        # anchored at 0: c x^m log(x)^l exp(w x), expanded up to x^0
        wk = Fraction(1)
        for j in range(t.m, 1):
            term = t.c * wk / math.factorial(j - t.m)
            collect((j, t.l), term)
            if t.l and t.branch:
                collect((j, 0), complex(term) * 2j * math.pi * t.branch)
            wk = wk * t.w
    for (j, l), c in coeffs.items():
        if j < 0 or l == 1:
            if is_exact(c):
                if GaussQ.coerce(c) != 0:
                    return DIVERGES
            elif abs(complex(c)) > 1e-12 * max(1.0, mags[(j, l)]):
                return DIVERGES
    add(coeffs.get((0, 0), 0))
    if float_acc == 0:
        return exact_acc
    return complex(exact_acc) + float_acc
