import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ibd import expr as ex
from ibd.exact import ExactValue, PiMonomial
from ibd.oracle import quad_1d, richardson_limit
from ibd.rules import (
    DivergentIntegral,
    IntractableCoupling,
    SimplexSpec,
    bivariate_euler_route,
    bivariate_oracle,
    bivariate_xplusy,
    change_of_variables_residual,
    euler_like_reduce,
    ibp_residual,
    laplace_eval,
    laplace_limit_eval,
    log_kernel_sinc_value,
    mc_simplex_laplace,
    radial_oracle,
    ramanujan_both_conventions,
    ramanujan_gamma,
    ramanujan_heaviside,
    ramanujan_oracle,
    ramanujan_sweep,
    rotational_closed_form,
    rotational_eval,
    separate,
    simplex_laplace,
    simplex_laplace_via_heaviside,
    simplex_volume_limit,
    simplex_weighted_reduce,
    sinc_alternative_route,
    sinc_route_kernel,
    tensor_eval,
)
from strategies import exppolys

F = Fraction
HALF_PI = ExactValue.build(pi=F(1, 2))

# frozen reference values (mpmath, 30 digits)
E_E1_1 = 0.596347362323194074341078499369      # e * E1(1) = int_0^inf exp(-t)/(1+t) dt
SIMPLEX_12 = 0.199788200446864024351475977325
SIMPLEX_123 = 0.0420967429712745279860141264638
BIVARIATE_25_1_3 = 0.622031581258464823216831488549
EULER_N2 = 0.126309871453251095053244815988    # int exp(-t) t / ((1+t)(2+t)) dt


# univariate rule ---------------------------------------------------------


def test_sinc_is_exactly_half_pi():
    assert laplace_limit_eval("sin(x)/x") == HALF_PI


def test_exppoly_limits():
    assert laplace_limit_eval("x*exp(-x)") == ExactValue.build(const=1)
    assert laplace_limit_eval("x^2*exp(-2*x)") == ExactValue.build(const=F(1, 4))
    q = quad_1d(lambda x: x * x * math.exp(-2 * x), 0, math.inf)
    assert q.value == pytest.approx(0.25, abs=1e-12)


@given(exppolys())
def test_exppoly_limit_is_termwise_gamma(f):
    assert complex(laplace_limit_eval(f)) == pytest.approx(complex(f.integral()), rel=1e-12, abs=1e-14)


def test_divergent_integrals_are_rejected():
    with pytest.raises(DivergentIntegral):
        laplace_limit_eval("exp(x)")
    with pytest.raises(DivergentIntegral):
        laplace_limit_eval("1")


def test_interval_domain():
    v = laplace_limit_eval("x", domain=("interval", 0, 2))
    assert complex(v) == pytest.approx(2.0, abs=1e-14)


def test_evaluation_at_a_rate():
    assert laplace_eval("sin(x)/x", at=0.5).real == pytest.approx(math.atan(2), rel=1e-14)


def test_sinc_alternative_route():
    assert sinc_alternative_route() == HALF_PI
    assert abs(float(sinc_alternative_route()) - float(laplace_limit_eval("sin(x)/x"))) < 1e-15
    assert log_kernel_sinc_value() == HALF_PI


def test_sinc_route_by_richardson():
    k = sinc_route_kernel()
    value, _ = richardson_limit(lambda y: k(y).real, 1e-3, levels=6)
    assert value == pytest.approx(math.pi / 2, abs=1e-9)


# Ramanujan ---------------------------------------------------------------


@pytest.mark.parametrize("n,p,expected", [(0, 0, F(1, 2)), (1, 1, F(-1, 8)), (1, 3, F(0))])
def test_ramanujan_heaviside_examples(n, p, expected):
    assert ramanujan_heaviside((n, p)) == ExactValue.build(pi=expected)


@pytest.mark.parametrize("n,p,expected", [(0, 0, F(1, 2)), (1, 1, F(-1, 8)), (2, 3, F(0))])
def test_ramanujan_gamma_examples(n, p, expected):
    assert ramanujan_gamma(n, p) == ExactValue.build(pi=expected)


def test_ramanujan_sweep_is_exact():
    sweep = ramanujan_sweep(12)
    assert len(sweep) == sum(2 * n + 5 for n in range(13))
    bad = [(n, p) for n, p, h, g in sweep if h != g]
    assert bad == []


@pytest.mark.parametrize("n,p", [(0, 0), (1, 0), (1, 1), (2, 1), (3, 2)])
def test_ramanujan_against_quadrature(n, p):
    q = ramanujan_oracle(n, p)
    assert q.converged
    assert q.value == pytest.approx(float(ramanujan_gamma(n, p)), abs=1e-8)


@pytest.mark.parametrize("n,p", [(0, F(1, 2)), (1, F(1, 2)), (2, F(3, 2))])
def test_jump_points_take_the_midpoint(n, p):
    both = ramanujan_both_conventions(n, p)
    assert both["H(0)=1"] != both["H(0)=1/2"]
    mpmath.mp.dps = 20
    truth = mpmath.quadosc(lambda x: mpmath.sin(x) ** (2 * n + 1) * mpmath.cos(2 * p.numerator * x / p.denominator) / x,
                           [0, mpmath.inf], period=mpmath.pi)
    assert float(both["H(0)=1/2"]) == pytest.approx(float(truth), abs=1e-12)


def test_off_jump_conventions_agree():
    both = ramanujan_both_conventions(1, F(1, 3))
    assert both["H(0)=1"] == both["H(0)=1/2"] == ExactValue.build(pi=F(1, 4))


# tensorization -----------------------------------------------------------


def test_tensor_examples():
    assert tensor_eval("x*y*exp(-x-y)", ["x", "y"]) == ExactValue.build(const=1)
    assert tensor_eval("exp(-x-2*y)", ["x", "y"]) == ExactValue.build(const=F(1, 2))
    assert tensor_eval("1", ["x", "y"], [3, 5]) == F(1, 15)


def test_tensor_refuses_coupling():
    with pytest.raises(IntractableCoupling):
        tensor_eval("1/(x+y)", ["x", "y"])
    with pytest.raises(IntractableCoupling):
        separate("sin(x*y)", ["x", "y"])


def test_tensor_matches_product_of_quadratures():
    v = tensor_eval("x^2*exp(-x)*sin(y)*exp(-y)", ["x", "y"])
    q1 = quad_1d(lambda x: x * x * math.exp(-x), 0, math.inf).value
    q2 = quad_1d(lambda y: math.sin(y) * math.exp(-y), 0, math.inf).value
    assert complex(v).real == pytest.approx(q1 * q2, rel=1e-12)


# bivariate family and the Euler-like reduction ---------------------------


def test_bivariate_unit_member():
    # nu = 1: the integrand is exp(-ux-vy) alone
    assert bivariate_xplusy(1, 2, 1) == pytest.approx(0.5, rel=1e-15)
    assert bivariate_xplusy(1, 1, 1) == pytest.approx(1.0, abs=1e-15)
    # confluent u = v: the double integral of exp(-u(x+y)) is 1/u^2
    assert bivariate_xplusy(1, 2, 2) == pytest.approx(0.25, rel=1e-15)
    assert bivariate_oracle(1, 2, 2).value == pytest.approx(0.25, rel=1e-10)


def test_bivariate_log_member():
    assert bivariate_xplusy(0, 2, 1) == pytest.approx(math.log(2), rel=1e-15)
    assert bivariate_euler_route(0, 2, 1).value == pytest.approx(math.log(2), rel=1e-12)
    assert bivariate_oracle(0, 2, 1).value == pytest.approx(math.log(2), rel=1e-10)


def test_bivariate_nu_two_and_a_half():
    v = bivariate_xplusy(2.5, 1, 3)
    assert v == pytest.approx(math.gamma(2.5) * (1 - 3**2.5) / (-2 * 3**2.5), rel=1e-15)
    assert v == pytest.approx(BIVARIATE_25_1_3, rel=1e-14)
    assert bivariate_oracle(2.5, 1, 3).value == pytest.approx(v, rel=1e-5)


@pytest.mark.parametrize("nu", [0.25, 0.5, 0.75])
def test_bivariate_euler_route_matches_closed_form(nu):
    assert bivariate_euler_route(nu, 1.5, 0.7).value == pytest.approx(bivariate_xplusy(nu, 1.5, 0.7), rel=1e-9)


@given(st.sampled_from([0.0, 0.5, 1.0, 2.5]), st.floats(0.5, 4.0))
def test_bivariate_confluent_continuity(nu, u):
    near, _ = richardson_limit(lambda h: bivariate_xplusy(nu, u, u + h), 1e-4, levels=3)
    assert near == pytest.approx(bivariate_xplusy(nu, u, u), abs=1e-6)
    assert bivariate_xplusy(nu, u, u + 1e-4) == pytest.approx(bivariate_xplusy(nu, u, u), rel=1e-3)


@given(st.sampled_from([0.0, 0.5, 2.5]), st.floats(0.5, 4.0), st.floats(0.5, 4.0))
def test_bivariate_symmetric(nu, u, v):
    assert bivariate_xplusy(nu, u, v) == pytest.approx(bivariate_xplusy(nu, v, u), rel=1e-12)


def test_euler_like_n1():
    mc, rhs = euler_like_reduce(1, (1,), (1,), (1,), 1)
    assert rhs.value == pytest.approx(E_E1_1, abs=1e-10)
    assert abs(mc.estimate - rhs.value) <= 3 * mc.standard_error


def test_euler_like_n2():
    mc, rhs = euler_like_reduce(1, (1, 1), (1, 2), (1, 1), 2)
    assert rhs.value == pytest.approx(EULER_N2, abs=1e-10)
    assert abs(mc.estimate - rhs.value) <= 3 * mc.standard_error


def test_euler_like_parameter_exchange():
    # with a0 = a = b = 1 the rhs integral is the lhs with nu and mu exchanged
    def direct(nu, mu):
        return quad_1d(lambda x: math.exp(-x) * x ** (nu - 1) * (1 + x) ** (-mu), 0, math.inf).value

    _, r1 = euler_like_reduce(1, (1,), (1,), (2.0,), 1.5, samples=1000)
    _, r2 = euler_like_reduce(1, (1,), (1,), (1.5,), 2.0, samples=1000)
    assert r1.value == pytest.approx(direct(2.0, 1.5), rel=1e-9)
    assert r2.value == pytest.approx(direct(1.5, 2.0), rel=1e-9)
    assert r1.value * math.gamma(1.5) == pytest.approx(r2.value * math.gamma(2.0), rel=1e-9)


# rotational invariance ---------------------------------------------------


@pytest.mark.parametrize("n", range(1, 7))
def test_rotational_is_exact(n):
    v = rotational_eval(f"sin(r)/r^{n}", n)
    assert isinstance(v, PiMonomial)
    assert v == rotational_closed_form(n)


def test_rotational_low_dimensions():
    assert rotational_eval("sin(r)/r^2", 2) == PiMonomial(1, 2)
    assert rotational_eval("sin(r)/r", 1) == PiMonomial(1, 1)


@pytest.mark.parametrize("n", [2, 3])
def test_rotational_against_radial_quadrature(n):
    q = radial_oracle(lambda r: math.sin(r) / r**n if r else 0.0, n, oscillatory=True)
    assert q.value == pytest.approx(float(rotational_closed_form(n)), rel=1e-6)


def test_rotational_at_a_rate():
    v = rotational_eval("exp(-r)", 3, at=1)
    q = radial_oracle(lambda r: math.exp(-2 * r), 3)
    assert complex(v).real == pytest.approx(q.value, rel=1e-8)


# simplex -----------------------------------------------------------------


def test_simplex_examples():
    assert simplex_laplace([1]) == pytest.approx(1 - math.exp(-1), rel=1e-15)
    assert simplex_laplace([1, 2]) == pytest.approx(SIMPLEX_12, rel=1e-14)
    assert simplex_laplace([1, 2, 3]) == pytest.approx(SIMPLEX_123, rel=1e-13)


def test_simplex_degenerate_fallback():
    assert simplex_laplace([0, 0, 0]) == pytest.approx(1 / 6, abs=1e-8)
    exact = quad_1d(lambda t: t * t * math.exp(-t), 0, 1).value / 2
    assert simplex_laplace([1, 1, 1]) == pytest.approx(exact, abs=1e-8)


@pytest.mark.parametrize("n", range(1, 6))
def test_simplex_volume_limit(n):
    value, _ = simplex_volume_limit(n)
    assert value == pytest.approx(1 / math.factorial(n), abs=1e-6)


@given(st.lists(st.floats(0.2, 5.0), min_size=2, max_size=4, unique=True))
def test_simplex_permutation_symmetry(a):
    base = simplex_laplace(a)
    for perm in itertools.permutations(a):
        assert simplex_laplace(list(perm)) == pytest.approx(base, rel=1e-9)


@pytest.mark.parametrize("a", [[1.0, 2.0, 3.0], [0.5, 1.5, 4.0]])
def test_simplex_monotone(a):
    base = simplex_laplace(a)
    for i in range(len(a)):
        b = list(a)
        b[i] += 0.37
        assert simplex_laplace(b) < base


def test_simplex_heaviside_route():
    v, _ = simplex_laplace_via_heaviside([1])
    assert v == pytest.approx(1 - math.exp(-1), abs=1e-10)
    v, _ = simplex_laplace_via_heaviside([1, 2])
    assert v == pytest.approx(SIMPLEX_12, abs=1e-5)
    v, _ = simplex_laplace_via_heaviside([50])
    assert v == pytest.approx((1 - math.exp(-50)) / 50, rel=1e-8)


def test_simplex_against_mc():
    mc = mc_simplex_laplace([1, 2], samples=200_000, seed=3)
    assert abs(mc.estimate - SIMPLEX_12) <= 3 * mc.standard_error


def test_simplex_weighted_examples():
    r, d = simplex_weighted_reduce(SimplexSpec([0, 0, 0]), samples=10_000)
    assert r.value == pytest.approx(1 / 6, abs=1e-12)
    r, d = simplex_weighted_reduce(SimplexSpec([0, 0], alpha=[1, 1], profile="t"), samples=200_000)
    assert r.value == pytest.approx(1 / 3, abs=1e-12)
    assert abs(d.estimate - 1 / 3) <= 3 * d.standard_error
    r, d = simplex_weighted_reduce(SimplexSpec([0, 0, 0], alpha=[1, 2, 1.5], profile="exp(-t)"), samples=200_000)
    assert abs(d.estimate - r.value) <= 3 * d.standard_error


def test_simplex_spec_validation():
    with pytest.raises(ValueError):
        SimplexSpec([])
    with pytest.raises(ValueError):
        SimplexSpec([1, 2], alpha=[1])


# compatibility with integration by parts and change of variables ---------


@given(exppolys(), exppolys())
def test_integration_by_parts(f, g):
    assert ibp_residual(f, g) <= 1e-8


@given(exppolys(), st.floats(0.2, 5.0), st.floats(0.1, 3.0))
def test_change_of_variables(f, c, y):
    assert change_of_variables_residual(f, c, y) <= 1e-10


def test_profile_vectorizes():
    r, _ = simplex_weighted_reduce(SimplexSpec([0, 0], profile=lambda t: np.asarray(t) ** 2), samples=100)
    assert r.value == pytest.approx(0.25, abs=1e-12)
    assert ex.parse("t^2") is not None
