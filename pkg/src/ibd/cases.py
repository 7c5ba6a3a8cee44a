"""Case registry: each case pairs a method path with an independent oracle."""

from __future__ import annotations

import fnmatch
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import expr as ex
from .kernels import power_kernel
from .oracle import quad_1d, quad_oscillatory
from .psido import SeriesOp, apply_series
from .qcalc import QContext, Dq, eq_series, jackson_integral, kurokawa_check, q_ibd_eval, q_int
from .rules import (
    SimplexSpec,
    bivariate_oracle,
    bivariate_xplusy,
    change_of_variables_residual,
    euler_like_reduce,
    ibp_residual,
    laplace_limit_eval,
    mc_simplex_laplace,
    radial_oracle,
    ramanujan_heaviside,
    ramanujan_oracle,
    ramanujan_sweep,
    rotational_closed_form,
    rotational_eval,
    simplex_laplace,
    simplex_laplace_via_heaviside,
    simplex_volume_limit,
    simplex_weighted_reduce,
    sinc_alternative_route,
)

DEFAULT_SEED = 12345


class UnknownCase(KeyError):
    pass


class InvalidParams(ValueError):
    pass


@dataclass(frozen=True)
class Outcome:
    """What a case body returns before errors and status are filled in."""

    method: complex
    oracle: complex
    note: str = ""
    regularized: bool = False


@dataclass
class CaseRecord:
    case_id: str
    params: dict
    method_value: complex
    oracle_value: complex
    abs_err: float
    rel_err: float
    tol: float
    status: str
    note: str
    seconds: float


@dataclass(frozen=True)
class Case:
    case_id: str
    description: str
    anchor: str
    tol: float
    defaults: dict
    body: Callable[..., Outcome] = field(repr=False)


@dataclass(frozen=True)
class RunOptions:
    seed: int = DEFAULT_SEED
    heaviside_midpoint: bool = False


REGISTRY: dict[str, Case] = {}


def register(case_id: str, description: str, anchor: str, tol: float, **defaults):
    def deco(fn):
        REGISTRY[case_id] = Case(case_id, description, anchor, tol, defaults, fn)
        return fn

    return deco


# ---------------------------------------------------------------------------
# parameter handling


def _convert(name: str, raw, default):
    if not isinstance(raw, str):
        return raw
    try:
        if isinstance(default, bool):
            if raw.lower() not in ("true", "false", "1", "0"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, Fraction):
            return Fraction(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            return tuple(float(x) for x in raw.split(",") if x.strip())
    except ValueError as err:
        raise InvalidParams(f"bad value for {name}: {raw!r}") from err
    return raw


def resolve_params(case: Case, params: dict | None) -> dict:
    out = dict(case.defaults)
    for k, v in (params or {}).items():
        if k not in case.defaults:
            known = ", ".join(case.defaults) or "none"
            raise InvalidParams(f"case {case.case_id} has no parameter {k!r} (known: {known})")
        out[k] = _convert(k, v, case.defaults[k])
    return out


def format_params(params: dict) -> str:
    def show(v):
        if isinstance(v, tuple):
            return ",".join(format(x, "g") for x in v)
        if isinstance(v, float):
            return format(v, "g")
        return str(v)

    return ";".join(f"{k}={show(v)}" for k, v in params.items())


# ---------------------------------------------------------------------------
# running


def _errors(method: complex, oracle: complex) -> tuple[float, float]:
    abs_err = abs(complex(method) - complex(oracle))
    scale = abs(complex(oracle))
    if scale == 0:
        rel_err = 0.0 if abs_err == 0 else math.inf
    else:
        rel_err = abs_err / scale
    return abs_err, rel_err


def classify(abs_err: float, rel_err: float, tol: float, regularized: bool) -> str:
    """pass iff either error is within ``tol``; within-tolerance regularized results are flagged."""
    if not (abs_err <= tol or rel_err <= tol):
        return "fail"
    return "flagged" if regularized else "pass"


def get_case(case_id: str) -> Case:
    try:
        return REGISTRY[case_id]
    except KeyError:
        raise UnknownCase(case_id) from None


def run_case(case_id: str, params: dict | None = None, tol: float | None = None,
             seed: int = DEFAULT_SEED, heaviside_midpoint: bool = False) -> CaseRecord:
    case = get_case(case_id)
    p = resolve_params(case, params)
    tol = case.tol if tol is None else float(tol)
    if not tol >= 0:
        raise InvalidParams("tolerance must be nonnegative")
    start = time.perf_counter()
    out = case.body(p, RunOptions(seed, heaviside_midpoint))
    seconds = time.perf_counter() - start
    abs_err, rel_err = _errors(out.method, out.oracle)
    status = classify(abs_err, rel_err, tol, out.regularized)
    note = out.note
    if out.regularized and not note:
        raise AssertionError(f"regularized case {case_id} must carry a note")
    return CaseRecord(case_id, p, complex(out.method), complex(out.oracle), abs_err, rel_err,
                      tol, status, note, seconds)


def matching(pattern: str = "*") -> list[str]:
    return sorted(cid for cid in REGISTRY if fnmatch.fnmatchcase(cid, pattern))


def verify_all(pattern: str = "*", tol: float | None = None, seed: int = DEFAULT_SEED,
               heaviside_midpoint: bool = False) -> tuple[list[CaseRecord], int]:
    """Run every case matching ``pattern``; exit code 0 iff nothing failed."""
    records = [run_case(cid, None, tol, seed, heaviside_midpoint) for cid in matching(pattern)]
    records.sort(key=lambda r: r.case_id)
    return records, (1 if any(r.status == "fail" for r in records) else 0)


def _mc_note(method: float, mc) -> str:
    z = abs(method - mc.estimate) / mc.standard_error if mc.standard_error else math.inf
    return f"MC oracle {mc.sample_count} samples, seed {mc.seed}, se {mc.standard_error:.3e}, |z| {z:.2f}"


# ---------------------------------------------------------------------------
# cases


@register("bivariate", "quadrant integral of (x+y)^(nu-1) exp(-ux-vy), closed form vs 2-D quadrature",
          "entry 3.1.3.7 family", 1e-5, nu=2.5, u=1.0, v=3.0)
def _bivariate(p, opts):
    q = bivariate_oracle(p["nu"], p["u"], p["v"])
    return Outcome(bivariate_xplusy(p["nu"], p["u"], p["v"]), q.value,
                   f"oracle error estimate {q.error_estimate:.2e}")


@register("bivariate-log", "1/(x+y) member (log u - log v)/(u - v) vs 2-D quadrature",
          "entry 3.1.3.8", 1e-8, u=2.0, v=1.0)
def _bivariate_log(p, opts):
    q = bivariate_oracle(0.0, p["u"], p["v"])
    return Outcome(bivariate_xplusy(0.0, p["u"], p["v"]), q.value, "nu = 0 member of the family")


def _random_exppoly(rng: np.random.Generator) -> ex.ExpPoly:
    k = int(rng.integers(1, 4))
    return ex.ExpPoly.from_terms(
        (float(rng.uniform(-2, 2)), float(rng.uniform(0.3, 3.0)), int(rng.integers(0, 4))) for _ in range(k)
    )


@register("compat-change-of-variables", "rule commutes with x -> c x on random exponential polynomials",
          "compatibility with change of variables", 1e-8, count=100)
def _compat_cov(p, opts):
    rng = np.random.default_rng(opts.seed)
    worst = 0.0
    for _ in range(p["count"]):
        f = _random_exppoly(rng)
        worst = max(worst, change_of_variables_residual(f, float(rng.uniform(0.2, 5.0)), float(rng.uniform(0.1, 3.0))))
    return Outcome(worst, 0.0, "method value is the largest residual")


@register("compat-ibp", "integration by parts on random exponential polynomial pairs",
          "compatibility with integration by parts", 1e-8, count=100)
def _compat_ibp(p, opts):
    rng = np.random.default_rng(opts.seed)
    worst = max(ibp_residual(_random_exppoly(rng), _random_exppoly(rng)) for _ in range(p["count"]))
    return Outcome(worst, 0.0, "method value is the largest residual")


@register("euler-like-n1", "Entry 3.3.5.4 at n=1: 1-D reduced integral vs MC over the orthant",
          "entry 3.3.5.4", 1e-2, a0=1.0, a=(1.0,), b=(1.0,), nu=(1.0,), mu=1.0, samples=1_000_000)
@register("euler-like-n2", "Entry 3.3.5.4 at n=2: 1-D reduced integral vs MC over the orthant",
          "entry 3.3.5.4", 1e-2, a0=1.0, a=(1.0, 1.0), b=(1.0, 2.0), nu=(1.0, 1.0), mu=2.0, samples=1_000_000)
def _euler_like(p, opts):
    mc, rhs = euler_like_reduce(p["a0"], p["a"], p["b"], p["nu"], p["mu"], samples=p["samples"], seed=opts.seed)
    return Outcome(rhs.value, mc.estimate, _mc_note(rhs.value, mc))


@register("kurokawa", "Jackson integral of Hurwitz zeta vs the binomial zeta series",
          "Kurokawa's q-integral of the Hurwitz zeta function", 1e-6, s=0.5, q=0.5)
def _kurokawa(p, opts):
    r = kurokawa_check(p["s"], QContext(p["q"]))
    return Outcome(r.rhs, r.lhs, r.note, r.regularized)


@register("q-dq-eq", "D_q e_q(ax) = a e_q(ax)", "q-exponential eigenfunction property", 1e-12,
          a=2.0, x=0.1, q=0.5)
def _q_dq_eq(p, opts):
    ctx = QContext(p["q"])
    a = p["a"]
    return Outcome(Dq(lambda t: eq_series(a * t, ctx), p["x"], ctx), a * eq_series(a * p["x"], ctx))


@register("q-ibd", "q-analogue of the operator rule vs the Jackson sum", "q-integration by differentiation",
          1e-10, f="exp(x)", a=0.0, b=1.0, q=0.5)
def _q_ibd(p, opts):
    ctx = QContext(p["q"])
    f = ex.parse(p["f"])
    return Outcome(q_ibd_eval(f, p["a"], p["b"], ctx, var="x"),
                   jackson_integral(f, p["a"], p["b"], ctx).value)


@register("q-jackson-monomial", "Jackson integral of x^m over [0,1] vs 1/[m+1]_q",
          "Jackson integral of monomials", 1e-14, m=3, q=0.5)
def _q_jackson(p, opts):
    ctx = QContext(p["q"])
    m = p["m"]
    return Outcome(jackson_integral(lambda x: x**m, 0.0, 1.0, ctx).value, 1.0 / q_int(m + 1, ctx))


@register("ramanujan", "sin^(2n+1)(y) cos(2py)/y: Heaviside formula vs oscillatory quadrature",
          "Ramanujan's integral via shift operators", 1e-8, n=2, p=Fraction(1))
def _ramanujan(p, opts):
    h0 = Fraction(1, 2) if opts.heaviside_midpoint else Fraction(1)
    method = ramanujan_heaviside((p["n"], p["p"]), h0=h0)
    q = ramanujan_oracle(p["n"], float(p["p"]))
    conv = "H(0)=1/2" if opts.heaviside_midpoint else "H(0)=1"
    return Outcome(float(method), q.value, f"{conv}; exact value {method}")


@register("ramanujan-exact", "exact rational sweep: Heaviside formula equals the Gamma formula",
          "Ramanujan's integral, closed form", 0.0, n=12)
def _ramanujan_exact(p, opts):
    sweep = ramanujan_sweep(p["n"])
    equal = sum(1 for _, _, h, g in sweep if h == g)
    return Outcome(equal, len(sweep), f"{equal} of {len(sweep)} (n, p) pairs equal exactly")


@register("rotational", "integral of sin|x|/|x|^n over R^n: exact rule vs radial quadrature",
          "rotationally invariant integrals, I_n", 1e-6, n=2)
def _rotational(p, opts):
    n = p["n"]
    exact = rotational_eval(f"sin(r)/r^{n}", n)
    closed = rotational_closed_form(n)
    q = radial_oracle(lambda r: math.sin(r) / r**n if r else (1.0 if n == 1 else 0.0), n, oscillatory=True)
    agree = "matches" if exact == closed else "differs from"
    return Outcome(float(exact), q.value, f"exact {exact} {agree} pi^(n/2+1)/Gamma(n/2)")


@register("rotational-exp", "integral of exp(-(1+u)|x|) over R^n: rule at u vs radial quadrature",
          "rotational rule with an exponential weight", 1e-8, n=3, u=1.0)
def _rotational_exp(p, opts):
    n, u = p["n"], p["u"]
    q = radial_oracle(lambda r: math.exp(-(1 + u) * r), n)
    return Outcome(complex(rotational_eval("exp(-r)", n, at=u)).real, q.value)


@register("series-exp", "truncated series for exp(-D) on 1/x vs the exact shift 1/(x-1)",
          "operator power series", 1e-12, order=40, x=2.0)
def _series_exp(p, opts):
    op = SeriesOp.from_expr("exp(y)", "y", order=p["order"])
    k, tail = apply_series(op, power_kernel(-1), at=p["x"])
    return Outcome(complex(k.evaluate(p["x"])).real, 1.0 / (p["x"] - 1.0), f"tail estimate {tail:.2e}")


@register("simplex-degenerate", "repeated rates: perturbation fallback vs 1-D quadrature",
          "simplex Laplace transform, confluent rates", 1e-8, a=1.0, n=3)
def _simplex_degenerate(p, opts):
    n, a = p["n"], p["a"]
    if n < 1:
        raise InvalidParams("n must be positive")
    q = quad_1d(lambda t: t ** (n - 1) * math.exp(-a * t), 0.0, 1.0, tol=1e-13)
    return Outcome(complex(simplex_laplace([a] * n)).real, q.value / math.factorial(n - 1),
                   "perturbation and Richardson fallback")


@register("simplex-heaviside", "simplex Laplace transform: Heaviside-Fourier route vs closed form",
          "sign-function route", 1e-5, a=(1.0, 2.0, 3.0))
def _simplex_heaviside(p, opts):
    value, q = simplex_laplace_via_heaviside(p["a"])
    return Outcome(value, complex(simplex_laplace(p["a"])).real, f"quadrature error estimate {q.error_estimate:.2e}")


@register("simplex-laplace", "simplex Laplace transform closed form vs MC", "entry 3.3.4.17", 1e-2,
          a=(1.0, 2.0, 3.0), samples=1_000_000)
def _simplex_laplace(p, opts):
    mc = mc_simplex_laplace(p["a"], samples=p["samples"], seed=opts.seed)
    method = complex(simplex_laplace(p["a"])).real
    return Outcome(method, mc.estimate, _mc_note(method, mc))


@register("simplex-volume", "a -> 0 Richardson limit of the closed form vs 1/n!", "volume of the simplex",
          1e-6, n=5)
def _simplex_volume(p, opts):
    n = p["n"]
    value, delta = simplex_volume_limit(n)
    return Outcome(value, 1.0 / math.factorial(n), f"Richardson delta {delta:.2e}")


@register("simplex-weighted", "Entry 3.2.2.3: reduced 1-D integral vs MC over the simplex", "entry 3.2.2.3",
          1e-2, alpha=(1.0, 2.0, 1.5), f="exp(-t)", samples=1_000_000)
def _simplex_weighted(p, opts):
    spec = SimplexSpec([0.0] * len(p["alpha"]), alpha=p["alpha"], profile=p["f"])
    reduced, mc = simplex_weighted_reduce(spec, samples=p["samples"], seed=opts.seed)
    return Outcome(reduced.value, mc.estimate, _mc_note(reduced.value, mc))


@register("sinc", "integral of sin(y)/y over [0, inf): both operator routes vs oscillatory quadrature",
          "Dirichlet integral", 1e-8)
def _sinc(p, opts):
    first = laplace_limit_eval("sin(x)/x")
    second = sinc_alternative_route()
    q = quad_oscillatory(lambda y: math.sin(y) / y if y else 1.0, 0.0)
    exact = first.as_pi_multiple() == second.as_pi_multiple() == Fraction(1, 2)
    note = f"both routes give {first}" if exact else f"routes give {first} and {second}"
    return Outcome(float(complex(first).real), q.value, note + "; operator sign convention f(-d/dx) on 1/x")


__all__ = [
    "Case", "CaseRecord", "InvalidParams", "REGISTRY", "UnknownCase", "classify", "format_params",
    "get_case", "matching", "resolve_params", "run_case", "verify_all",
]
