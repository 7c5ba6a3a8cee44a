"""Zeta functions and complex Gamma for expression evaluation."""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

from scipy import special as _sp


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2 (Akiyama-Tanigawa, exact)."""
    if n == 1:
        return Fraction(-1, 2)
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0]


_EM_TERMS = 20


def hurwitz_zeta(s: float, a: float, n_direct: int | None = None) -> float:
    """Hurwitz zeta ``sum_{n>=0} (a+n)^-s`` continued to all real ``s != 1``.

    Euler-Maclaurin: ``n_direct`` terms summed directly, then the integral
    tail, the half endpoint term and Bernoulli corrections until they fall
    below double precision. ``n_direct`` defaults to ``12 + s`` for positive
    ``s`` and 8 otherwise (the direct sum grows for negative ``s``).
    For negative ``s`` the pieces are of size ``(a + n_direct)^(1-s)`` and
    cancel, so the absolute error is about eps times that.
    """
    s = float(s)
    a = float(a)
    if s == 1.0:
        raise DomainError("hurwitz_zeta has a pole at s = 1")
    if a <= 0:
        raise DomainError("hurwitz_zeta needs a > 0")
    if n_direct is None:
        n_direct = 12 + int(s) if s > 0 else 8
    head = math.fsum((a + n) ** -s for n in range(n_direct))
    x = a + n_direct
    tail = [x ** (1.0 - s) / (s - 1.0), 0.5 * x**-s]
    # rising factorial s(s+1)...(s+2j-2) folded into the loop
    rising = s
    power = x ** (-s - 1.0)
    scale = max(abs(head), abs(tail[0]), 1e-300)
    for j in range(1, _EM_TERMS + 1):
        term = float(bernoulli(2 * j) / math.factorial(2 * j)) * rising * power
        tail.append(term)
        if abs(term) < 1e-18 * scale or rising == 0.0:
            break
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= x * x
    return head + math.fsum(tail)


def riemann_zeta(s: float) -> float:
    return hurwitz_zeta(s, 1.0)


def binom_neg(s: float, kmax: int) -> list[float]:
    """``binom(-s, k)`` for k = 0..kmax via the ratio recurrence."""
    out = [1.0]
    for k in range(1, kmax + 1):
        out.append(out[-1] * (-s - k + 1) / k)
    return out


def cgamma(z: complex) -> complex:
    """Gamma for complex arguments; DomainError at the poles."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise DomainError(f"gamma pole at {z.real:g}")
    if z.imag == 0:
        return complex(math.gamma(z.real))
    return complex(_sp.gamma(z))


def clog(z: complex) -> complex:
    if z == 0:
        raise DomainError("log(0)")
    return cmath.log(z)
