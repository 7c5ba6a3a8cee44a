import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ibd.qcalc import (
    Dq,
    QContext,
    QSeriesDivergence,
    eq_product,
    eq_series,
    hurwitz_zeta,
    jackson_antiderivative,
    jackson_integral,
    kurokawa_check,
    q_factorial,
    q_ibd_eval,
    q_int,
    riemann_zeta,
)
from ibd.special import DomainError, bernoulli

F = Fraction

# frozen reference values (mpmath, 30 digits)
EQ_1_HALF = 3.46274661945506361154             # e_q(1) at q = 1/2
JACKSON_EXP_HALF = 2.06782148553900754613      # int_0^1 exp(x) d_q x at q = 1/2
JACKSON_EXPNEG_INF_HALF = 0.721352103336861969825  # int_0^inf exp(-x) d_q x at q = 1/2
ZETA_HALF = -1.46035450880958681289
KUROKAWA_LHS_HALF = {0.5: -0.443483814989071369, 0.3: -0.694911125989943087}
KUROKAWA_S2_JACKSON = 0.889561294359905137


# q-integers --------------------------------------------------------------


def test_q_integers_are_exact_for_rational_q():
    assert q_int(3, F(1, 2)) == F(7, 4)
    assert q_factorial(3, F(1, 2)) == F(1) * F(3, 2) * F(7, 4)
    assert q_factorial(0, F(1, 3)) == 1


def test_q_integers_tend_to_integers():
    assert q_int(5, 1 - 1e-9) == pytest.approx(5, rel=1e-7)


def test_context_validation():
    for bad in (0, 1, -0.5, 1.5):
        with pytest.raises(ValueError):
            QContext(bad)


# q-derivative and q-exponential ------------------------------------------


@given(st.integers(0, 8), st.floats(0.1, 2.0), st.sampled_from([0.3, 0.5, 0.9]))
def test_dq_of_monomial(n, x, q):
    assert Dq(lambda t: t**n, x, q) == pytest.approx(float(q_int(n, q)) * x ** (n - 1) if n else 0.0,
                                                      rel=1e-10, abs=1e-12)


def test_dq_at_zero_uses_the_taylor_coefficient():
    assert Dq("sin(x)", 0, 0.5) == 1
    with pytest.raises(ValueError):
        Dq(math.sin, 0, 0.5)


def test_eq_value():
    assert eq_series(1, 0.5) == pytest.approx(EQ_1_HALF, rel=1e-15)


def test_eq_series_equals_product(q_grid):
    for q in q_grid:
        for x in (-0.9 / (1 - q), 0.3, 0.9 / (1 - q)):
            assert eq_series(x, q) == pytest.approx(eq_product(x, q), rel=1e-13)


def test_eq_product_starting_at_one_drops_a_factor():
    x, q = 1.0, 0.5
    assert eq_product(x, q, start=1) == pytest.approx(eq_product(x, q) * (1 - x * (1 - q)), rel=1e-15)


@given(st.floats(0.05, 0.9), st.booleans(), st.sampled_from([0.3, 0.5, 0.9]))
def test_eq_is_fixed_by_dq(r, negative, q):
    # inside the radius 1/(1-q), and away from 0 where the difference quotient cancels
    x = (-r if negative else r) / (1 - q)
    assert Dq(lambda t: eq_series(t, q), x, q) == pytest.approx(eq_series(x, q), rel=1e-11)


def test_eq_series_outside_the_radius_diverges():
    # radius of convergence is 1/(1-q)
    with pytest.raises((QSeriesDivergence, DomainError)):
        eq_product(2.0, 0.5)


# Jackson integrals -------------------------------------------------------


@pytest.mark.parametrize("m", range(6))
def test_jackson_monomial(q_grid, m):
    for q in q_grid:
        r = jackson_integral(lambda x: x**m, 0, 1, q)
        assert r.value == pytest.approx(1 / float(q_int(m + 1, q)), rel=1e-14)


def test_jackson_exponential():
    assert jackson_integral("exp(x)", 0, 1, 0.5).value == pytest.approx(JACKSON_EXP_HALF, rel=1e-14)


def test_jackson_semi_infinite():
    r = jackson_integral("exp(-x)", 0, math.inf, 0.5)
    assert r.value == pytest.approx(JACKSON_EXPNEG_INF_HALF, rel=1e-13)


def test_jackson_argument_checks():
    with pytest.raises(ValueError):
        jackson_integral("x", -1, 1, 0.5)
    with pytest.raises(ValueError):
        jackson_integral("x", 1, math.inf, 0.5)


def test_jackson_tends_to_riemann():
    r = jackson_integral("exp(x)", 0, 1, 0.999)
    assert r.value == pytest.approx(math.e - 1, rel=1e-3)


@given(st.floats(0.1, 2.0), st.sampled_from([0.3, 0.5, 0.9]))
def test_fundamental_theorem(x, q):
    big = jackson_antiderivative("cos(x)", q)
    assert Dq(big, x, q) == pytest.approx(math.cos(x), rel=1e-10, abs=1e-12)


@given(st.sampled_from(["exp(x)", "cos(x)", "1/(2-x)", "x^3-x"]),
       st.floats(0.0, 0.8), st.floats(0.0, 1.0), st.sampled_from([0.3, 0.5, 0.9]))
def test_q_ibd_matches_jackson(f, a, b, q):
    direct = jackson_integral(f, a, b, q).value if b >= a else -jackson_integral(f, b, a, q).value
    assert q_ibd_eval(f, a, b, q) == pytest.approx(direct, rel=1e-10, abs=1e-12)


# zeta functions ----------------------------------------------------------


def test_bernoulli_numbers():
    assert [bernoulli(n) for n in (0, 1, 2, 4, 6)] == [1, F(-1, 2), F(1, 6), F(-1, 30), F(1, 42)]


def test_riemann_zeta_examples():
    assert riemann_zeta(2) == pytest.approx(math.pi**2 / 6, rel=1e-15)
    assert riemann_zeta(0) == pytest.approx(-0.5, rel=1e-15)
    assert riemann_zeta(-1) == pytest.approx(-1 / 12, rel=1e-14)
    assert riemann_zeta(0.5) == pytest.approx(ZETA_HALF, rel=1e-14)
    with pytest.raises(DomainError):
        riemann_zeta(1)
    with pytest.raises(DomainError):
        hurwitz_zeta(2, 0)


@given(st.floats(-4.5, 8.0).filter(lambda s: abs(s - 1) > 1e-3), st.floats(0.05, 5.0))
def test_hurwitz_against_mpmath(s, a):
    truth = float(mpmath.zeta(s, a))
    # for s < 0 the summed pieces are of size (a + 8)^(1 - s) and cancel
    scale = max(1.0, abs(truth), (a + 8) ** (1 - s) if s < 0 else 0.0)
    assert abs(hurwitz_zeta(s, a) - truth) <= 1e-14 * scale


# Kurokawa identity -------------------------------------------------------


@pytest.mark.parametrize("q", [0.5, 0.3])
def test_kurokawa_half(q):
    r = kurokawa_check(0.5, q)
    assert r.mode == "accelerated" and not r.regularized
    assert r.lhs == pytest.approx(KUROKAWA_LHS_HALF[q], rel=1e-14)
    assert r.rhs == pytest.approx(r.lhs, abs=1e-12)
    assert r.direct_lhs == pytest.approx(r.lhs, abs=1e-12)
    assert r.abel_value == pytest.approx(r.series_value, abs=1e-8)


@pytest.mark.parametrize("s", [0.0, -1.0, -2.0, -3.0])
def test_kurokawa_nonpositive_integers_are_finite_sums(s):
    r = kurokawa_check(s, 0.5)
    assert r.mode == "classical"
    assert r.rhs == pytest.approx(r.lhs, abs=1e-13)
    assert r.direct_lhs == pytest.approx(r.lhs, abs=1e-13)


@pytest.mark.parametrize("s", [0.9, -2.5])
def test_kurokawa_convergent_noninteger(s):
    r = kurokawa_check(s, 0.5)
    assert not r.regularized
    assert r.rhs == pytest.approx(r.lhs, abs=1e-12)


@pytest.mark.parametrize("s", [1.5, 2.0, 3.0])
def test_kurokawa_above_one_is_flagged(s):
    r = kurokawa_check(s, 0.5)
    assert r.formal and r.raw_divergent and r.regularized
    assert r.mode == "euler"
    assert "formal" in r.note and "Euler" in r.note
    assert r.rhs == pytest.approx(r.lhs, abs=1e-9)
    assert r.direct_lhs is None


def test_kurokawa_s2_parts():
    r = kurokawa_check(2.0, 0.5)
    assert r.formal_term == pytest.approx(-0.5, rel=1e-15)
    assert r.jackson_part == pytest.approx(KUROKAWA_S2_JACKSON, rel=1e-14)


def test_kurokawa_pole():
    with pytest.raises(DomainError):
        kurokawa_check(1.0, 0.5)


@given(st.floats(-3.0, 0.95).filter(lambda s: abs(s - round(s)) > 0.05), st.sampled_from([0.3, 0.5, 0.9]))
def test_kurokawa_property_below_one(s, q):
    r = kurokawa_check(s, q)
    assert abs(r.lhs - r.rhs) <= 1e-9 * max(1.0, abs(r.lhs))
