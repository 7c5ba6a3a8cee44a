import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ibd import expr as ex
from ibd.exact import ExactValue, GaussQ, PiMonomial
from ibd.kernels import (
    DIVERGES,
    Kernel,
    KernelError,
    KernelTerm,
    OutsideClosure,
    antiderivative,
    derivative_n,
    elementary_laplace_kernel,
    exp_kernel,
    heaviside_kernel,
    limit_at_zero,
    log_kernel,
    power_kernel,
    radial_constant,
    shift,
)
from ibd.oracle import richardson_limit

F = Fraction
small_fracs = st.fractions(min_value=-3, max_value=3, max_denominator=4)
gauss = st.builds(GaussQ, small_fracs, small_fracs)
right_gauss = st.builds(GaussQ, st.fractions(min_value=F(1, 2), max_value=3, max_denominator=4), small_fracs)


@st.composite
def terms(draw, shifts=gauss, logs=True, exps=True):
    m = draw(st.integers(-3, 3))
    l = draw(st.integers(0, 1)) if logs else 0
    w = draw(st.sampled_from([0, 0, F(-1), F(-1, 2), F(-2)])) if exps else 0
    return KernelTerm(c=draw(gauss.filter(lambda g: g != 0)), s=draw(shifts), m=m, l=l, w=w)


def kernels(**kw):
    return st.lists(terms(**kw), min_size=1, max_size=4).map(Kernel.from_terms)


# elementary kernels ------------------------------------------------------


def test_semi_infinite_kernel_is_reciprocal():
    assert elementary_laplace_kernel("semi_infinite", "x") == power_kernel(-1)


def test_interval_kernel():
    k = elementary_laplace_kernel(("interval", 0, 1), "a")
    assert k(2.0) == pytest.approx((1 - math.exp(-2)) / 2, rel=1e-15)
    assert limit_at_zero(k) == ExactValue.build(const=1)
    with pytest.raises(KernelError):
        elementary_laplace_kernel(("interval", 1, 1), "a")


def test_radial_kernel_constant():
    assert radial_constant(2) == PiMonomial(2, 1)
    assert radial_constant(3) == PiMonomial(8, 1)  # 2 pi^(3/2) Gamma(3) / Gamma(3/2)
    k = elementary_laplace_kernel(("radial", 2), "u")
    assert k(1.0) == pytest.approx(2 * math.pi, rel=1e-15)


def test_orthant_kernel_factors():
    ks = elementary_laplace_kernel(("orthant", 3), "u")
    assert [k.var for k in ks] == ["u1", "u2", "u3"]
    assert math.prod(k(v).real for k, v in zip(ks, (2.0, 3.0, 5.0))) == pytest.approx(1 / 30)


# shift -------------------------------------------------------------------


def test_shift_examples():
    assert str(shift(log_kernel(), GaussQ(0, 1))) == "log(x+i)"
    n, k = 2, 1
    assert shift(heaviside_kernel(0, var="p"), F(2 * n + 1, 2) - k) == heaviside_kernel(F(3, 2), var="p")
    assert shift(power_kernel(-1), 0) == power_kernel(-1)


def test_shift_multiplies_exponentials():
    k = shift(exp_kernel(-2), 1)
    assert k(0.5) == pytest.approx(math.exp(-3), rel=1e-15)


@given(kernels(), gauss, gauss)
def test_shift_composition_is_exact(k, a, b):
    assert shift(shift(k, a), b) == shift(k, a + b)


@given(st.lists(st.builds(heaviside_kernel, small_fracs), min_size=1, max_size=3), small_fracs, small_fracs)
def test_heaviside_shift_composition(hs, a, b):
    k = hs[0]
    for h in hs[1:]:
        k = k + h
    assert shift(shift(k, a), b) == shift(k, a + b)


@given(kernels(shifts=st.builds(GaussQ, st.fractions(0, 3, max_denominator=4), small_fracs)),
       st.floats(0.5, 3.0), right_gauss)
def test_shifted_kernel_evaluates_at_shifted_point(k, x, a):
    assume(all(abs(complex(x) + complex(t.s)) > 0.1 for t in k.terms))
    lhs = shift(k, a)(x)
    rhs = k(x + complex(a))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


# derivatives and antiderivatives -----------------------------------------


def test_derivative_examples():
    assert derivative_n(power_kernel(-1), 2) == power_kernel(-3, c=2)
    assert derivative_n(log_kernel(), 1) == power_kernel(-1)
    assert derivative_n(exp_kernel(-2), 3) == exp_kernel(-2, c=-8)


def test_derivative_refuses_heaviside():
    with pytest.raises(KernelError):
        derivative_n(heaviside_kernel(1), 1)


def test_antiderivative_examples():
    assert antiderivative(power_kernel(-1)) == log_kernel()
    assert antiderivative(power_kernel(2)) == power_kernel(3, c=F(1, 3))
    assert antiderivative(exp_kernel(-3)) == exp_kernel(-3, c=F(-1, 3))


def test_antiderivative_outside_closure():
    with pytest.raises(OutsideClosure):
        antiderivative(Kernel.from_terms([KernelTerm(m=-1, l=1)]))
    with pytest.raises(OutsideClosure):
        antiderivative(Kernel.from_terms([KernelTerm(m=-2, w=-1)]))


@st.composite
def closure_terms(draw):
    """Terms whose antiderivative stays in the family."""
    kind = draw(st.sampled_from(["power", "log", "exp"]))
    c = draw(gauss.filter(lambda g: g != 0))
    s = draw(gauss)
    if kind == "power":
        return KernelTerm(c=c, s=s, m=draw(st.integers(-4, 3)))
    if kind == "log":
        return KernelTerm(c=c, s=s, m=draw(st.integers(-3, 3).filter(lambda m: m != -1)), l=1)
    return KernelTerm(c=c, s=s, m=draw(st.integers(0, 3)), w=draw(st.sampled_from([F(-1), F(-1, 2), F(2)])))


@given(st.lists(closure_terms(), min_size=1, max_size=4).map(Kernel.from_terms))
def test_derivative_inverts_antiderivative(k):
    assert derivative_n(antiderivative(k), 1) == k


# printing ----------------------------------------------------------------


@given(kernels())
def test_kernel_prints_in_the_grammar(k):
    assert ex.parse(str(k)) == k.to_expr()
    x = 1.3
    assert abs(ex.evaluate(ex.parse(str(k)), {"x": x}) - k(x)) <= 1e-12 * max(1.0, abs(k(x)))


# limits ------------------------------------------------------------------


def test_sinc_log_limit_is_half_pi():
    lk = log_kernel(var="y")
    k = (shift(lk, GaussQ(0, 1)) - shift(lk, GaussQ(0, -1))).scale(GaussQ(1) / GaussQ(0, 2))
    assert limit_at_zero(k) == ExactValue.build(pi=F(1, 2))


def test_reciprocal_diverges():
    assert limit_at_zero(power_kernel(-1)) is DIVERGES
    assert limit_at_zero(log_kernel()) is DIVERGES


def test_heaviside_right_limit():
    assert limit_at_zero(heaviside_kernel(0)) == ExactValue.build(const=1)
    assert limit_at_zero(heaviside_kernel(F(-1, 2))) == ExactValue()


@given(kernels(shifts=st.builds(GaussQ, st.fractions(F(1, 2), 3, max_denominator=4), small_fracs)))
def test_limit_agrees_with_richardson(k):
    lim = limit_at_zero(k)
    assert lim is not DIVERGES
    value, _ = richardson_limit(lambda h: k(h), 0.05, levels=6)
    assert abs(complex(lim) - value) <= 1e-8 * max(1.0, abs(value))


def test_cancelling_poles_give_finite_limit():
    # 1/x - exp(-x)/x -> 1
    k = power_kernel(-1) - Kernel.from_terms([KernelTerm(m=-1, w=-1)])
    assert limit_at_zero(k) == ExactValue.build(const=1)
    assert cmath.isclose(k(1e-8), 1, rel_tol=1e-7)
