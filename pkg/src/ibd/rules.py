"""Integration by differentiation.

The integral of ``f(y) exp(-x y)`` over a domain equals ``f(-D_x)`` applied
to the closed form of the integral of ``exp(-x y)`` alone; letting ``x -> 0``
recovers the plain integral. This module applies that rule to univariate
exponential and trigonometric polynomials (optionally divided by a power of
the variable), separable multivariate integrands, rotationally invariant
integrands, Ramanujan's ``int_0^inf sin^(2n+1)(x) cos(2px) / x dx``, Laplace
transforms of simplex indicators, and two integrals reduced through the
Euler integral representation of inverse powers.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import expr as ex
from .exact import ExactValue, GaussQ, PiMonomial, gamma_exact, is_exact, simplify_scalar
from .kernels import (
    DIVERGES,
    Kernel,
    KernelError,
    antiderivative,
    derivative_n,
    elementary_laplace_kernel,
    heaviside_kernel,
    limit_at_zero,
    log_kernel,
    power_kernel,
    radial_constant,
    shift,
)
from .oracle import McResult, QuadResult, mc_orthant_exp, mc_simplex, quad_1d, quad_oscillatory, richardson_limit
from .psido import OperatorError, apply_shift_sum, exponential_sum, inverse_power_apply, trig_power_expand


class DivergentIntegral(ValueError):
    """The integral (or the kernel limit standing for it) is infinite."""


class IntractableCoupling(ValueError):
    """The multivariate integrand does not factor into univariate pieces."""


# ---------------------------------------------------------------------------
# univariate rule


def _split_inverse_power(e: ex.Expr, var: str) -> tuple[ex.Expr, int, object]:
    """``e = top / (c * var^r)``; returns ``(top, r, c)`` with r = 0 if no such split."""
    if isinstance(e, ex.BinOp) and e.op == "/" and var in ex.free_vars(e.right):
        try:
            den = ex.exp_poly_terms(e.right, (var,))
        except ex.NotExpPoly:
            raise OperatorError("denominator must be a monomial in the variable") from None
        if len(den) == 1:
            ((key, c),) = den.items()
            (b, r) = key[0]
            if b == 0 and r > 0:
                return e.left, r, c
        raise OperatorError("denominator must be a monomial in the variable")
    return e, 0, 1


def operator_form(f, var: str = "x") -> tuple[dict, int]:
    """``f(y) = y^-r * sum alpha y^n exp(beta y)`` as ``({(beta, n): alpha}, r)``."""
    if isinstance(f, ex.ExpPoly):
        return {(simplify_scalar(-b), n): c for c, b, n in f.terms}, 0
    if isinstance(f, str):
        f = ex.parse(f)
    top, r, c = _split_inverse_power(f, var)
    terms = exponential_sum(top, var)
    if not (is_exact(c) and GaussQ.coerce(c) == 1):
        inv = GaussQ(1) / GaussQ.coerce(c) if is_exact(c) else 1 / complex(c)
        terms = {k: simplify_scalar(a * inv) for k, a in terms.items()}
    return terms, r


def _vanishes_to_order(terms: dict, r: int) -> bool:
    """Taylor coefficients of order < r of the exponential polynomial vanish."""
    for j in range(r):
        total, scale = 0, 0.0
        for (b, n), a in terms.items():
            if n <= j:
                t = a * (b ** (j - n) if j > n else 1) / math.factorial(j - n)
                total = total + t
                scale += abs(complex(t))
        if is_exact(total):
            if GaussQ.coerce(total) != 0:
                return False
        elif abs(complex(total)) > 1e-12 * max(1.0, scale):
            return False
    return True


def _check_tail(terms: dict, r: int) -> None:
    for (b, n), a in terms.items():
        re = complex(b).real
        if re > 0:
            raise DivergentIntegral(f"growing exponential with rate {b}")
        if re == 0:
            limit = -2 if complex(b) == 0 else -1
            if n - r > limit:
                raise DivergentIntegral("integrand does not decay fast enough")


def apply_operator(f, k: Kernel, var: str = "x", check_tail: bool = True, measure_power: int = 0) -> Kernel:
    """``f(-D)`` applied to the kernel ``k``.

    ``y^n exp(beta y)`` acts as ``(-D)^n`` after the shift by ``-beta``;
    a divisor ``y^r`` acts as ``(-1)^r`` times the r-fold antiderivative.
    The integrability checks assume the measure ``y^measure_power dy``.
    """
    terms, r = operator_form(f, var)
    r_eff = r - measure_power
    if r_eff > 0 and not _vanishes_to_order(terms, r_eff):
        raise DivergentIntegral("integrand is not integrable at 0")
    if check_tail:
        _check_tail(terms, r_eff)
    base = k
    for _ in range(r):
        base = antiderivative(base).scale(-1)
    out = Kernel((), k.var)
    for (b, n), a in terms.items():
        out = out + derivative_n(shift(base, simplify_scalar(-b)), n).scale(a * (-1) ** n)
    return out


def laplace_eval(f, domain="semi_infinite", var: str = "x", at=None):
    """Integral of ``f(y) exp(-at y)`` over the domain by the operator rule.

    ``at=None`` takes the limit ``x -> 0+`` through :func:`limit_at_zero`
    (exact :class:`ExactValue` when possible); a number evaluates the kernel
    there. ``domain`` is ``"semi_infinite"`` or ``("interval", a, b)``.
    """
    k = elementary_laplace_kernel(domain, "x")
    result = apply_operator(f, k, var, check_tail=(domain == "semi_infinite" and at is None))
    if at is not None:
        try:
            return result.evaluate_exact(at)
        except KernelError:
            return result.evaluate(at)
    value = limit_at_zero(result)
    if value is DIVERGES:
        raise DivergentIntegral("kernel limit at 0 is infinite")
    return value


def laplace_limit_eval(f, domain="semi_infinite", var: str = "x"):
    return laplace_eval(f, domain, var, at=None)


def sinc_alternative_route() -> ExactValue:
    """``-Im lim_{y->0} log(y - i)``: the rule for ``1/x`` with rate ``y - i``."""
    k = antiderivative(power_kernel(-1, var="y")).scale(-1)  # (-D)^-1 applied to 1/y
    return limit_at_zero(shift(k, GaussQ(0, -1))).imag


def sinc_route_kernel() -> Kernel:
    """``(log(y+i) - log(y-i)) / (2i)``, the sine shift sum on ``-log y``."""
    return apply_operator("sin(x)/x", power_kernel(-1, var="y"))


# ---------------------------------------------------------------------------
# Ramanujan's integral


@dataclass(frozen=True)
class RamanujanParams:
    n: int
    p: Fraction

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        object.__setattr__(self, "p", Fraction(self.p))

    @property
    def integer_p(self) -> bool:
        return self.p.denominator == 1


def ramanujan_heaviside(params: RamanujanParams | tuple, h0=Fraction(1)) -> ExactValue:
    """``pi * trig_power_expand(2n+1)`` applied to ``H(p)``, exactly.

    ``h0`` is the value taken at a jump (1 by default, 1/2 for midpoints).
    """
    if not isinstance(params, RamanujanParams):
        params = RamanujanParams(*params)
    op = trig_power_expand(2 * params.n + 1)
    k = apply_shift_sum(op, heaviside_kernel(0, var="p"))
    return ExactValue.build(pi=k.evaluate_exact(params.p, Fraction(h0)))


def ramanujan_gamma(n: int, p: int) -> ExactValue:
    """``(-1)^p sqrt(pi)/2 Gamma(n+1) Gamma(n+1/2) / (Gamma(n-p+1) Gamma(n+p+1))``.

    Zero when either denominator Gamma sits at a pole.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n - p + 1 <= 0 or n + p + 1 <= 0:
        return ExactValue()
    val = PiMonomial(Fraction((-1) ** (p % 2), 2), Fraction(1, 2)) * gamma_exact(n + 1) * gamma_exact(
        Fraction(2 * n + 1, 2)) / (gamma_exact(n - p + 1) * gamma_exact(n + p + 1))
    assert val.power == 1 or val.coef == 0
    return ExactValue.build(pi=val.coef)


def ramanujan_sweep(n_max: int = 12, p_margin: int = 2) -> list[tuple[int, int, ExactValue, ExactValue]]:
    """Both evaluations for ``0 <= n <= n_max`` and integer ``|p| <= n + p_margin``."""
    out = []
    for n in range(n_max + 1):
        for p in range(-n - p_margin, n + p_margin + 1):
            out.append((n, p, ramanujan_heaviside((n, p)), ramanujan_gamma(n, p)))
    return out


def ramanujan_both_conventions(n: int, p) -> dict[str, ExactValue]:
    """Heaviside sum under ``H(0) = 1`` and ``H(0) = 1/2``, side by side."""
    params = RamanujanParams(n, p)
    return {"H(0)=1": ramanujan_heaviside(params), "H(0)=1/2": ramanujan_heaviside(params, Fraction(1, 2))}


def ramanujan_integrand(n: int, p: float) -> Callable[[float], float]:
    def f(x):
        if x == 0:
            return 0.0 if n else 1.0
        return math.sin(x) ** (2 * n + 1) * math.cos(2 * p * x) / x

    return f


def ramanujan_oracle(n: int, p: float, tol: float = 1e-10) -> QuadResult:
    """Oscillatory quadrature over slabs of width pi.

    For integer ``p`` the numerator changes sign under ``x -> x + pi``, so the
    slab sums alternate and Euler acceleration applies.
    """
    return quad_oscillatory(ramanujan_integrand(n, p), 0.0, half_period=math.pi, tol=tol)


# ---------------------------------------------------------------------------
# multivariate: tensorization, rotational invariance


def _factors(e: ex.Expr) -> list[tuple[ex.Expr, int]]:
    """Flatten products/quotients and split exponentials of sums."""
    if isinstance(e, ex.BinOp) and e.op == "*":
        return _factors(e.left) + _factors(e.right)
    if isinstance(e, ex.BinOp) and e.op == "/":
        return _factors(e.left) + [(f, -p) for f, p in _factors(e.right)]
    if isinstance(e, ex.Neg):
        return [(ex.Number(Fraction(-1)), 1)] + _factors(e.arg)
    if isinstance(e, ex.Call) and e.name == "exp":
        arg = e.args[0]
        if isinstance(arg, ex.BinOp) and arg.op in "+-":
            right = arg.right if arg.op == "+" else ex.neg(arg.right)
            return _factors(ex.call("exp", arg.left)) + _factors(ex.call("exp", right))
        if isinstance(arg, ex.Neg) and isinstance(arg.arg, ex.BinOp) and arg.arg.op in "+-":
            inner = arg.arg
            right = ex.neg(inner.right) if inner.op == "+" else inner.right
            return _factors(ex.call("exp", ex.neg(inner.left))) + _factors(ex.call("exp", right))
    return [(e, 1)]


def separate(f: ex.Expr | str, variables: Sequence[str]) -> tuple[object, dict[str, ex.Expr]]:
    """Split ``f`` into a constant and one factor per variable."""
    if isinstance(f, str):
        f = ex.parse(f)
    const: object = Fraction(1)
    per_var: dict[str, ex.Expr] = {v: ex.ONE for v in variables}
    for fac, p in _factors(f):
        fv = ex.free_vars(fac)
        if not fv:
            val = ex._const_value(fac)
            const = const * val if p > 0 else const / val
            continue
        if len(fv) > 1:
            raise IntractableCoupling(f"factor {ex.to_string(fac)} couples {sorted(fv)}")
        (v,) = fv
        if v not in per_var:
            raise IntractableCoupling(f"unknown variable {v}")
        per_var[v] = ex.mul(per_var[v], fac) if p > 0 else ex.div(per_var[v], fac)
    return simplify_scalar(const), per_var


def tensor_eval(f: ex.Expr | str, variables: Sequence[str], rates: Sequence | None = None):
    """``f(-D_u1, ..., -D_un)`` applied to ``prod 1/u_i``.

    ``rates=None`` (or a rate of None) takes the limit ``u_i -> 0+``.
    Only separable integrands are accepted.
    """
    const, per_var = separate(f, variables)
    rates = list(rates) if rates is not None else [None] * len(variables)
    out = const
    for v, u in zip(variables, rates):
        val = laplace_eval(per_var[v], var=v, at=u)
        if isinstance(out, ExactValue) or isinstance(val, ExactValue):
            out = _mul_values(out, val)
        else:
            out = out * val
    return out


def _mul_values(a, b):
    for x, y in ((a, b), (b, a)):
        if isinstance(x, ExactValue) and is_exact(y):
            return x.scale(y)
        if isinstance(x, ExactValue) and isinstance(y, ExactValue) and not (x.pi or x.logs):
            return y.scale(x.const)
    return complex(a) * complex(b)


def rotational_eval(f: ex.Expr | str, n: int, var: str = "r", at=None):
    """Integral over R^n of ``f(|x|)`` (times ``exp(-at |x|)`` when ``at`` is given).

    Computed as ``2 pi^(n/2) Gamma(n) / Gamma(n/2) * lim f(-D_u) u^-n``. When
    the limit is a rational multiple of pi the result is an exact
    :class:`PiMonomial`.
    """
    const = radial_constant(n)
    k = apply_operator(f, power_kernel(-n, var="u"), var, check_tail=at is None, measure_power=n - 1)
    if at is not None:
        return float(const) * k.evaluate(at)
    lim = limit_at_zero(k)
    if lim is DIVERGES:
        raise DivergentIntegral("kernel limit at 0 is infinite")
    if isinstance(lim, ExactValue):
        r = lim.as_pi_multiple()
        if r is not None:
            return const * PiMonomial(r, 1)
        if not lim.pi and not lim.logs and lim.const.is_real:
            return const * lim.const.re
    return float(const) * complex(lim)


def rotational_closed_form(n: int) -> PiMonomial:
    """``pi^(n/2+1) / Gamma(n/2)``, the integral of ``sin|x| / |x|^n`` over R^n."""
    return PiMonomial(1, Fraction(n, 2) + 1) / gamma_exact(Fraction(n, 2))


def radial_oracle(g: Callable[[float], float], n: int, oscillatory: bool = False, tol: float = 1e-10) -> QuadResult:
    """Surface area of the unit sphere times ``int_0^inf g(r) r^(n-1) dr``."""
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)

    def h(r):
        return g(r) * r ** (n - 1)

    res = quad_oscillatory(h, 0.0, tol=tol) if oscillatory else quad_1d(h, 0.0, math.inf, tol=tol)
    return QuadResult(area * res.value, area * res.error_estimate, res.subdivisions, res.converged)


# ---------------------------------------------------------------------------
# bivariate family and the Euler-like reduction


def bivariate_xplusy(nu: float, u: float, v: float) -> float:
    """Integral over the quadrant of ``(x+y)^(nu-1) exp(-u x - v y)``.

    ``Gamma(nu) (u^nu - v^nu) / ((u-v) (uv)^nu)`` for ``nu > 0``;
    ``nu = 0`` is the ``1/(x+y)`` member ``(log u - log v) / (u - v)``.
    At ``u = v`` the confluent values ``Gamma(nu+1) u^(-nu-1)`` and ``1/u``.
    """
    if u <= 0 or v <= 0:
        raise ValueError("u and v must be positive")
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    if u == v:
        return 1.0 / u if nu == 0 else math.gamma(nu + 1) * u ** (-nu - 1)
    if nu == 0:
        return (math.log(u) - math.log(v)) / (u - v)
    return math.gamma(nu) * (u**nu - v**nu) / ((u - v) * (u * v) ** nu)


def bivariate_euler_route(nu: float, u: float, v: float, tol: float = 1e-11) -> QuadResult:
    """The same integral for ``0 <= nu < 1`` through the operator rule.

    ``(x+y)^(nu-1)`` becomes ``(-D_u - D_v)^(nu-1)`` acting on ``1/(uv)``,
    and the inverse power is applied with the Euler integral representation.
    """
    if not 0 <= nu < 1:
        raise ValueError("the Euler route covers 0 <= nu < 1")
    return inverse_power_apply(1 - nu, (1.0, 1.0), 0.0, lambda p: 1.0 / (p[0] * p[1]), (u, v), tol=tol)


def bivariate_oracle(nu: float, u: float, v: float, tol: float = 1e-11) -> QuadResult:
    """Iterated 2-D quadrature in ``s = x + y`` and ``x = s tau``."""

    def inner(s):
        if s == 0:
            return 1.0 if nu == 0 else 0.0
        r = quad_1d(lambda tau: math.exp(-s * (u * tau + v * (1 - tau))), 0.0, 1.0, tol=tol)
        return s**nu * r.value

    return quad_1d(inner, 0.0, math.inf, tol=tol)


def euler_like_reduce(
    a0: float,
    a: Sequence[float],
    b: Sequence[float],
    nu: Sequence[float],
    mu: float,
    samples: int = 1_000_000,
    seed: int = 12345,
) -> tuple[McResult, QuadResult]:
    """Both sides of the orthant identity

    ``int exp(-b.x) prod x_k^(nu_k-1) (a0 + a.x)^-mu dx
    = prod Gamma(nu_k) / Gamma(mu) int_0^inf exp(-a0 t) t^(mu-1) prod (b_k + a_k t)^-nu_k dt``.

    The left side is a Monte Carlo estimate with exponential draws of rates
    ``b``; the right side applies ``(a0 - a.D_b)^-mu`` to the factorized
    orthant integral ``prod Gamma(nu_k) b_k^-nu_k``.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    nu = np.asarray(nu, float)
    if not (a.shape == b.shape == nu.shape):
        raise ValueError("a, b and nu must have equal length")
    if a0 <= 0 or mu <= 0 or (a <= 0).any() or (b <= 0).any() or (nu <= 0).any():
        raise ValueError("parameters must be positive")

    def lhs_f(x):
        return np.prod(x ** (nu - 1), axis=1) * (a0 + x @ a) ** (-mu)

    lhs = mc_orthant_exp(lhs_f, b, samples=samples, seed=seed)
    gnu = math.prod(math.gamma(t) for t in nu)
    rhs = inverse_power_apply(mu, a, a0, lambda p: gnu * float(np.prod(p ** (-nu))), b)
    return lhs, rhs


# ---------------------------------------------------------------------------
# simplex indicator


@dataclass(frozen=True)
class SimplexSpec:
    a: tuple
    alpha: tuple | None = None
    profile: object = None

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        if not self.a:
            raise ValueError("simplex dimension must be at least 1")
        if self.alpha is not None:
            object.__setattr__(self, "alpha", tuple(self.alpha))
            if len(self.alpha) != len(self.a):
                raise ValueError("alpha and a differ in length")

    @property
    def n(self) -> int:
        return len(self.a)


def _cexpm1(z: complex) -> complex:
    """``exp(z) - 1`` without cancellation for small ``|z|``."""
    x, y = z.real, z.imag
    re = math.expm1(x) * math.cos(y) - 2.0 * math.sin(y / 2) ** 2
    return complex(re, math.exp(x) * math.sin(y))


def _simplex_closed(a: Sequence[complex]) -> complex:
    total = 0j
    for k, ak in enumerate(a):
        dphi = 1 + 0j
        for i, ai in enumerate(a):
            if i != k:
                dphi *= ai - ak
        total += _cexpm1(-ak) / (-ak * dphi)
    return total


def _distinct_nonzero(a: Sequence[complex], tol: float = 1e-6) -> bool:
    scale = max(1.0, max(abs(x) for x in a))
    if any(abs(x) <= tol * scale for x in a):
        return False
    return all(abs(a[i] - a[j]) > tol * scale for i in range(len(a)) for j in range(i))


def simplex_laplace(spec: SimplexSpec | Sequence) -> complex | float:
    """Integral of ``exp(-a.x)`` over the standard simplex.

    ``sum_k (exp(-a_k) - 1) / (-a_k phi'(-a_k))`` with ``phi(x) = prod (x + a_i)``.
    Repeated or vanishing rates are moved off the diagonal along
    ``a_i + i eps c_i`` and the limit ``eps -> 0`` is extrapolated.
    """
    a = [complex(x) for x in (spec.a if isinstance(spec, SimplexSpec) else spec)]
    real = all(x.imag == 0 for x in a)
    if _distinct_nonzero(a):
        val = _simplex_closed(a)
    else:
        n = len(a)
        dirs = [1j * (k + 1) / n for k in range(n)]

        def g(eps):
            return _simplex_closed([x + eps * d for x, d in zip(a, dirs)])

        val, _ = richardson_limit(lambda h: g(h).real, 0.5, levels=7)
        if not real:
            val = val + 1j * richardson_limit(lambda h: g(h).imag, 0.5, levels=7)[0]
    return val.real if real and isinstance(val, complex) else val


def simplex_volume_limit(n: int, h0: float = 1.0, levels: int = 7) -> tuple[float, float]:
    """Richardson limit of ``simplex_laplace(h * (1, 2, ..., n))`` as ``h -> 0``."""
    return richardson_limit(lambda h: simplex_laplace([h * (k + 1) for k in range(n)]), h0, levels=levels)


def simplex_laplace_via_heaviside(spec: SimplexSpec | Sequence, tol: float = 1e-11) -> tuple[float, QuadResult]:
    """``1/(2 prod a) + 1/(2 pi) int_R Im(exp(iy) / prod(a_j + iy)) / y dy``.

    The integrand is even, so the line integral is twice the half-line one,
    which is summed over slabs of width pi with Euler acceleration.
    """
    a = np.asarray(spec.a if isinstance(spec, SimplexSpec) else spec, dtype=float)
    if (a <= 0).any():
        raise ValueError("the Heaviside route needs positive rates")

    def h(y):
        if y == 0:
            # limit of Im(e^{iy}/prod(a+iy))/y at 0: 1 - sum 1/a_j, over prod a
            return (1.0 - float(np.sum(1.0 / a))) / float(np.prod(a))
        return (cmath.exp(1j * y) / np.prod(a + 1j * y)).imag / y

    res = quad_oscillatory(h, 0.0, half_period=math.pi, tol=tol)
    value = 1.0 / (2.0 * float(np.prod(a))) + res.value / math.pi
    return value, res


def mc_simplex_laplace(a: Sequence[float], samples: int = 1_000_000, seed: int = 12345) -> McResult:
    a = np.asarray(a, dtype=float)
    return mc_simplex(lambda x: np.exp(-x @ a), len(a), samples=samples, seed=seed)


def _profile(f) -> Callable:
    if f is None:
        return lambda t: np.ones_like(np.asarray(t, dtype=float))
    if isinstance(f, str):
        f = ex.parse(f)
    if isinstance(f, ex.Expr):
        fv = ex.free_vars(f)
        if len(fv) > 1:
            raise ValueError("profile must depend on one variable")
        name = next(iter(fv)) if fv else "t"
        expr = f

        def g(t):
            arr = np.asarray(t, dtype=float)
            return np.broadcast_to(ex.evaluate_array(expr, {name: arr}), arr.shape)

        return g
    return f


def simplex_weighted_reduce(
    spec: SimplexSpec, u: float = 0.0, samples: int = 1_000_000, seed: int = 12345
) -> tuple[QuadResult, McResult]:
    """Integral over the simplex of ``f(sum x) exp(-u sum x) prod x_i^(alpha_i - 1)``.

    Reduced: ``prod Gamma(alpha_i) / Gamma(sum alpha) int_0^1 f(t) exp(-u t)
    t^(sum alpha - 1) dt``; direct: uniform simplex sampling.
    """
    alpha = np.asarray(spec.alpha if spec.alpha is not None else [1.0] * spec.n, dtype=float)
    if (alpha <= 0).any():
        raise ValueError("alpha must be positive")
    f = _profile(spec.profile)
    total = float(alpha.sum())
    const = math.prod(math.gamma(x) for x in alpha) / math.gamma(total)

    def reduced_integrand(t):
        if t == 0 and total < 1:
            return 0.0
        return float(f(np.asarray([t]))[0]) * math.exp(-u * t) * t ** (total - 1)

    r = quad_1d(reduced_integrand, 0.0, 1.0, tol=1e-13)
    reduced = QuadResult(const * r.value, const * r.error_estimate, r.subdivisions, r.converged)

    def direct_integrand(x):
        s = x.sum(axis=1)
        return f(s) * np.exp(-u * s) * np.prod(x ** (alpha - 1), axis=1)

    direct = mc_simplex(direct_integrand, spec.n, samples=samples, seed=seed)
    return reduced, direct


# ---------------------------------------------------------------------------
# compatibility with integration by parts and change of variables


def _as_complex(v) -> complex:
    return complex(v)


def ibp_residual(f: ex.ExpPoly, g: ex.ExpPoly) -> float:
    """``| I(f g') - [f g]_0^inf + I(f' g) |`` with ``I`` the operator rule."""
    boundary = -complex(f(0.0)) * complex(g(0.0))
    lhs = _as_complex(laplace_limit_eval(f * g.derivative()))
    rhs = _as_complex(laplace_limit_eval(f.derivative() * g))
    return abs(lhs - boundary + rhs)


def change_of_variables_residual(f: ex.ExpPoly, c: float, y: float) -> float:
    """Rule for ``f(c x) c exp(-y c x)`` versus the rule for ``f(u) exp(-y u)``."""
    lhs = laplace_eval(f.scaled_argument(c) * c, at=y * c)
    rhs = laplace_eval(f, at=y)
    return abs(lhs - rhs)


def log_kernel_sinc_value() -> ExactValue:
    """Limit of ``(log(y+i) - log(y-i)) / (2i)`` at ``y -> 0``."""
    lk = log_kernel(var="y")
    k = (shift(lk, GaussQ(0, 1)) - shift(lk, GaussQ(0, -1))).scale(GaussQ(1) / GaussQ(0, 2))
    return limit_at_zero(k)
