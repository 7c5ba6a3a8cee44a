"""Exact scalar types used where results must compare with ``==``.

``GaussQ`` is a Gaussian rational (``re + im*i`` with ``Fraction`` parts).
``PiMonomial`` is ``coef * pi**power`` with rational ``coef`` and half-integer
``power``; it covers Gamma values at integers and half-integers.
``ExactValue`` is a linear combination ``a + b*pi + sum(c_j * log(q_j))`` with
Gaussian-rational coefficients, which is what limits of log kernels produce.

Mixing any of these with ``float``/``complex`` degrades to ``complex``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union[int, Fraction, "GaussQ", float, complex]


def _frac(x) -> Fraction | None:
    if type(x) is Fraction:
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x)
    return None


@dataclass(frozen=True)
class GaussQ:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        if type(self.re) is not Fraction:
            object.__setattr__(self, "re", Fraction(self.re))
        if type(self.im) is not Fraction:
            object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def coerce(x) -> GaussQ | None:
        """Return ``x`` as a GaussQ when it is exact, else None."""
        if isinstance(x, GaussQ):
            return x
        f = _frac(x)
        if f is not None:
            return GaussQ(f, Fraction(0))
        return None

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        g = GaussQ.coerce(other)
        if g is None:
            if isinstance(other, (float, complex)):
                return complex(self) + other
            return NotImplemented
        return GaussQ(self.re + g.re, self.im + g.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        g = GaussQ.coerce(other)
        if g is None:
            if isinstance(other, (float, complex)):
                return complex(self) * other
            return NotImplemented
        return GaussQ(self.re * g.re - self.im * g.im, self.re * g.im + self.im * g.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        g = GaussQ.coerce(other)
        if g is None:
            if isinstance(other, (float, complex)):
                return complex(self) / other
            return NotImplemented
        d = g.re * g.re + g.im * g.im
        if d == 0:
            raise ZeroDivisionError("GaussQ division by zero")
        return GaussQ((self.re * g.re + self.im * g.im) / d, (self.im * g.re - self.re * g.im) / d)

    def __rtruediv__(self, other):
        g = GaussQ.coerce(other)
        if g is None:
            if isinstance(other, (float, complex)):
                return other / complex(self)
            return NotImplemented
        return g / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return complex(self) ** n
        if n < 0:
            return GaussQ(1) / (self ** (-n))
        out, base = GaussQ(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> GaussQ:
        return GaussQ(self.re, -self.im)

    def __eq__(self, other):
        g = GaussQ.coerce(other)
        if g is None:
            if isinstance(other, (float, complex)):
                return complex(self) == other
            return NotImplemented
        return self.re == g.re and self.im == g.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im:
            raise TypeError("GaussQ with nonzero imaginary part")
        return float(self.re)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def sort_key(self):
        return (self.re, self.im)

    def __repr__(self):
        if self.im == 0:
            return f"GaussQ({self.re})"
        return f"GaussQ({self.re}, {self.im})"


I = GaussQ(0, 1)


def is_exact(x) -> bool:
    return GaussQ.coerce(x) is not None


def to_complex(x) -> complex:
    return complex(x)


def simplify_scalar(x):
    """Canonical exact form: Fraction for real Gaussian rationals."""
    g = GaussQ.coerce(x)
    if g is not None:
        return g.re if g.im == 0 else g
    if isinstance(x, complex) and x.imag == 0:
        return x.real
    return x


def sort_key(x):
    g = GaussQ.coerce(x)
    if g is not None:
        return (float(g.re), float(g.im))
    c = complex(x)
    return (c.real, c.imag)


def exact_exp(w, a):
    """``exp(w*a)`` kept exact when the exponent is exactly zero."""
    prod = w * a
    if is_exact(prod) and GaussQ.coerce(prod) == 0:
        return Fraction(1)
    return cmath.exp(complex(prod))


# ---------------------------------------------------------------------------
# pi monomials


@dataclass(frozen=True)
class PiMonomial:
    """``coef * pi**power``; ``power`` is a half-integer."""

    coef: Fraction
    power: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coef", Fraction(self.coef))
        p = Fraction(self.power)
        if (2 * p).denominator != 1:
            raise ValueError("pi power must be a half-integer")
        object.__setattr__(self, "power", p if self.coef != 0 else Fraction(0))

    def __mul__(self, other):
        if isinstance(other, PiMonomial):
            return PiMonomial(self.coef * other.coef, self.power + other.power)
        f = _frac(other)
        if f is None:
            return NotImplemented
        return PiMonomial(self.coef * f, self.power)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PiMonomial):
            return PiMonomial(self.coef / other.coef, self.power - other.power)
        f = _frac(other)
        if f is None:
            return NotImplemented
        return PiMonomial(self.coef / f, self.power)

    def __neg__(self):
        return PiMonomial(-self.coef, self.power)

    def __float__(self):
        return float(self.coef) * math.pi ** float(self.power)

    def __complex__(self):
        return complex(float(self))

    def __repr__(self):
        return f"PiMonomial({self.coef}, {self.power})"

    def __str__(self):
        if self.coef == 0:
            return "0"
        if self.power == 0:
            return f"{self.coef}"
        return f"{self.coef}*pi^({self.power})"


def gamma_exact(x) -> PiMonomial:
    """Gamma at a positive integer or half-integer, exactly.

    Raises ValueError at the poles 0, -1, -2, ...; negative half-integers use
    the reflection through ``Gamma(x+1) = x*Gamma(x)``.
    """
    x = Fraction(x)
    if x.denominator == 1:
        if x <= 0:
            raise ValueError(f"Gamma pole at {x}")
        return PiMonomial(math.factorial(int(x) - 1), 0)
    if x.denominator != 2:
        raise ValueError("gamma_exact needs an integer or half-integer")
    # Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
    n = int(x - Fraction(1, 2))
    if n >= 0:
        return PiMonomial(Fraction(math.factorial(2 * n), 4**n * math.factorial(n)), Fraction(1, 2))
    out = gamma_exact(Fraction(1, 2))
    y = Fraction(1, 2)
    while y > x:
        y -= 1
        out = out / y
    return out


# ---------------------------------------------------------------------------
# linear combinations of 1, pi and logs of positive rationals


@dataclass(frozen=True)
class ExactValue:
    const: GaussQ = GaussQ()
    pi: GaussQ = GaussQ()
    logs: tuple = ()  # sorted ((q: Fraction > 0, coef: GaussQ), ...), q != 1

    @classmethod
    def build(cls, const=0, pi=0, logs=None) -> ExactValue:
        acc: dict[Fraction, GaussQ] = {}
        for q, c in (logs or {}).items() if isinstance(logs, dict) else (logs or ()):
            q = Fraction(q)
            if q <= 0:
                raise ValueError("log argument must be a positive rational")
            if q == 1:
                continue
            # log(q) for q < 1 is stored as -log(1/q)
            if q < 1:
                q, c = 1 / q, -GaussQ.coerce(c)
            acc[q] = acc.get(q, GaussQ()) + GaussQ.coerce(c)
        items = tuple(sorted((q, c) for q, c in acc.items() if c != 0))
        return cls(GaussQ.coerce(const), GaussQ.coerce(pi), items)

    @classmethod
    def log_of(cls, s) -> ExactValue | None:
        """Principal ``log(s)`` for ``s`` on a coordinate axis, exactly."""
        g = GaussQ.coerce(s)
        if g is None or g == 0:
            return None
        if g.im == 0:
            r = abs(g.re)
            return cls.build(pi=GaussQ(0, 1) if g.re < 0 else 0, logs={r: 1})
        if g.re == 0:
            r = abs(g.im)
            half = Fraction(1, 2) if g.im > 0 else Fraction(-1, 2)
            return cls.build(pi=GaussQ(0, half), logs={r: 1})
        return None

    def __add__(self, other):
        if isinstance(other, ExactValue):
            logs = dict(self.logs)
            for q, c in other.logs:
                logs[q] = logs.get(q, GaussQ()) + c
            return ExactValue.build(self.const + other.const, self.pi + other.pi, logs)
        g = GaussQ.coerce(other)
        if g is None:
            return NotImplemented
        return ExactValue(self.const + g, self.pi, self.logs)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> ExactValue:
        g = GaussQ.coerce(c)
        if g is None:
            raise TypeError("ExactValue can only be scaled exactly")
        return ExactValue.build(self.const * g, self.pi * g, {q: v * g for q, v in self.logs})

    def __mul__(self, other):
        if GaussQ.coerce(other) is None:
            return NotImplemented
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        g = GaussQ.coerce(other)
        if g is None:
            return NotImplemented
        return self.scale(GaussQ(1) / g)

    @property
    def real(self) -> ExactValue:
        return ExactValue.build(self.const.re, self.pi.re, {q: c.re for q, c in self.logs})

    @property
    def imag(self) -> ExactValue:
        return ExactValue.build(self.const.im, self.pi.im, {q: c.im for q, c in self.logs})

    def __complex__(self):
        out = complex(self.const) + complex(self.pi) * math.pi
        for q, c in self.logs:
            out += complex(c) * math.log(q)
        return out

    def __float__(self):
        z = complex(self)
        if z.imag != 0:
            raise TypeError("ExactValue is not real")
        return z.real

    def as_pi_multiple(self) -> Fraction | None:
        """Return r when the value is exactly r*pi with r rational."""
        if self.const == 0 and not self.logs and self.pi.is_real:
            return self.pi.re
        return None

    def __str__(self):
        parts = []
        if self.const:
            parts.append(_gq_str(self.const))
        if self.pi:
            parts.append(f"{_gq_str(self.pi)}*pi")
        for q, c in self.logs:
            parts.append(f"{_gq_str(c)}*log({q})")
        return " + ".join(parts) if parts else "0"


def _gq_str(g: GaussQ) -> str:
    if g.im == 0:
        return f"({g.re})"
    if g.re == 0:
        return f"({g.im}*i)"
    return f"({g.re}+{g.im}*i)"
