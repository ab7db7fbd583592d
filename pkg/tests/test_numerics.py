from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from bilateral_sums.numerics import (
    PoleError, QuadElem, digits_to_bits, golden_phi, guard_bits, log_gamma, pochhammer,
    polygamma, quad_reconstruct, rationalize,
)

PREC = 256
G = guard_bits(PREC)


def close(a, b, bits=PREC - G):
    return abs(a - b) <= mp.ldexp(max(1, abs(b)), -bits)


# -- log_gamma ----------------------------------------------------------------


def test_log_gamma_examples():
    with mp.workprec(PREC):
        assert close(log_gamma(1, PREC)[0], 0)
        lg, sign = log_gamma(Fraction(1, 2), PREC)
        assert sign == 1 and close(lg, mp.log(mp.sqrt(mp.pi)))
        assert mp.nstr(lg, 25).startswith("0.57236494292470008")
        lg, _ = log_gamma(Fraction(7, 2), PREC)
        assert close(lg, mp.log(15 * mp.sqrt(mp.pi) / 8))


def test_log_gamma_sign_on_negative_axis():
    with mp.workprec(PREC):
        for y in (Fraction(-1, 2), Fraction(-3, 2), Fraction(-5, 7)):
            lg, sign = log_gamma(y, PREC)
            ref = mp.gamma(mp.mpf(y.numerator) / y.denominator)
            assert sign == (1 if ref > 0 else -1)
            assert close(lg, mp.log(abs(ref)))


def test_log_gamma_pole():
    with pytest.raises(PoleError):
        log_gamma(-2, PREC)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 60), st.sampled_from([64, 200, 600]))
def test_log_gamma_matches_mpmath(y, prec):
    with mp.workprec(prec):
        lg, sign = log_gamma(y, prec)
        assert sign == 1
        assert close(lg, mp.loggamma(y), prec - guard_bits(prec))


# -- polygamma ----------------------------------------------------------------


def test_polygamma_examples():
    with mp.workprec(PREC):
        assert close(polygamma(0, 1, PREC), -mp.euler)
        assert close(polygamma(0, Fraction(1, 2), PREC), -mp.euler - 2 * mp.log(2))
        assert close(polygamma(1, 1, PREC), mp.pi ** 2 / 6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4), st.floats(-3.9, 20).filter(lambda v: abs(v - round(v)) > 0.01),
       st.sampled_from([100, 300, 900]))
def test_polygamma_matches_mpmath(m, y, prec):
    with mp.workprec(prec):
        assert close(polygamma(m, y, prec), mp.psi(m, y), prec - guard_bits(prec))


# -- pochhammer -----------------------------------------------------------------


def test_pochhammer_examples():
    half = Fraction(1, 2)
    with mp.workprec(PREC):
        assert pochhammer(half, 0, PREC) == 1
        assert close(pochhammer(half, 3, PREC), mp.mpf(15) / 8)
        assert close(pochhammer(half, half, PREC), 1 / mp.sqrt(mp.pi))
        assert mp.nstr(pochhammer(half, half, PREC), 10) == "0.5641895835"


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 2), st.floats(-0.49, 5))
def test_pochhammer_step(a, y):
    # (a)_{y+1} = (a)_y (a + y)
    with mp.workprec(PREC):
        a, y = mp.mpf(a), mp.mpf(y)
        if abs(a + y) < 1e-6 or min(abs(a + y - k) for k in range(-6, 1)) < 1e-6:
            return
        lhs = pochhammer(a, y + 1, PREC)
        rhs = pochhammer(a, y, PREC) * (a + y)
        assert close(lhs, rhs)


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("x", [Fraction(1, 7), Fraction(-1, 7), Fraction(3, 10)])
@pytest.mark.parametrize("s", [Fraction(1, 2), Fraction(1, 3), Fraction(1, 8)])
def test_reflection_properties(n, x, s):
    with mp.workprec(PREC):
        xv = mp.mpf(x.numerator) / x.denominator
        one = mp.mpf(1)
        # 1/(1)_{-n+x} = (-1)^{n+1} (1-x)_n/(1)_x * x/(n-x)
        lhs = 1 / pochhammer(one, -n + xv, PREC)
        rhs = (-1) ** (n + 1) * pochhammer(one, 0, PREC) * mp.rf(1 - xv, n) / pochhammer(one, xv, PREC) * xv / (n - xv)
        assert close(lhs, rhs)
        # (s)_{-n+x} = (-1)^n (s)_x / (1-s-x)_n
        sv = mp.mpf(s.numerator) / s.denominator
        lhs = pochhammer(sv, -n + xv, PREC)
        rhs = (-1) ** n * pochhammer(sv, xv, PREC) / mp.rf(1 - sv - xv, n)
        assert close(lhs, rhs)


# -- rationalize ---------------------------------------------------------------


def test_rationalize_examples():
    with mp.workprec(PREC):
        assert rationalize(mp.mpf(17) / 36, 10 ** 4, mp.mpf("1e-20")) == Fraction(17, 36)
        assert rationalize(mp.mpf("0.5"), 10, mp.mpf("1e-20")) == Fraction(1, 2)
    with mp.workprec(digits_to_bits(50)):
        assert rationalize(+mp.pi, 50, mp.mpf("1e-12")) is None
        # stdlib oracle: the best approximation with denominator <= 50 misses the tolerance
        best = Fraction(str(mp.nstr(mp.pi, 45))).limit_denominator(50)
        assert best == Fraction(22, 7) and abs(mp.pi - mp.mpf(22) / 7) > 1e-12


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=-1000, max_value=1000, max_denominator=10 ** 4),
       st.sampled_from([128, 256]))
def test_rationalize_round_trip_and_doubling(r, prec):
    for p in (prec, 2 * prec):
        with mp.workprec(p):
            v = mp.mpf(r.numerator) / r.denominator
            assert rationalize(v, 10 ** 4, mp.ldexp(1, -p // 2)) == r


# -- QuadElem ------------------------------------------------------------------


def test_quad_reconstruct_examples():
    with mp.workprec(PREC):
        tol = mp.ldexp(1, -PREC // 2)
        r = 168 + 75 * mp.sqrt(5)
        assert mp.nstr(r, 11) == "335.70509831"
        assert quad_reconstruct(r, 5, 10 ** 6, tol) == QuadElem(168, 75, 5)
        assert quad_reconstruct(mp.mpf("0.1875"), 5, 10 ** 6, tol) == QuadElem(Fraction(3, 16), 0, 5)
        assert quad_reconstruct(mp.sqrt(41), 41, 10 ** 6, tol) == QuadElem(0, 1, 41)


def test_golden_phi_powers():
    phi = golden_phi()
    assert phi == QuadElem(Fraction(11, 2), Fraction(5, 2), 5)
    assert phi ** 3 == QuadElem(682, 305, 5)
    assert phi ** -3 == QuadElem(-682, 305, 5)
    # 333 + 30/phi in the sqrt(5) basis
    assert 333 + 30 * phi.inverse() == QuadElem(168, 75, 5)
    with mp.workprec(PREC):
        ref = ((1 + mp.sqrt(5)) / 2) ** 5
        assert close(phi.to_mpf(), ref)
        assert close((phi ** 3).to_mpf(), ref ** 3)


def test_quad_elem_invariants():
    assert QuadElem(1, 0, 5).is_rational and QuadElem(1, 0, 5) == QuadElem(1)
    with pytest.raises(ValueError):
        QuadElem(1, 1, 12)
    assert QuadElem(3).sqrt() == QuadElem(0, 1, 3)
    assert QuadElem(1, 1, 2).sqrt() is None
    assert QuadElem(Fraction(9, 4)).sqrt() == QuadElem(Fraction(3, 2))
    assert QuadElem(6, 2, 5).sqrt() == QuadElem(1, 1, 5)


quads = st.builds(
    QuadElem,
    st.fractions(min_value=-50, max_value=50, max_denominator=30),
    st.fractions(min_value=-50, max_value=50, max_denominator=30),
    st.just(5),
)


@settings(max_examples=80, deadline=None)
@given(quads, quads)
def test_quad_field_arithmetic(a, b):
    with mp.workprec(PREC):
        assert close((a * b).to_mpf(), a.to_mpf() * b.to_mpf())
        assert close((a + b).to_mpf(), a.to_mpf() + b.to_mpf())
        if b != QuadElem(0):
            assert (a / b) * b == a


@settings(max_examples=30, deadline=None)
@given(quads)
def test_quad_eval_precision_doubling(a):
    with mp.workprec(2 * PREC):
        hi = a.to_mpf()
    with mp.workprec(PREC):
        assert close(a.to_mpf(), hi)


def test_digits_to_bits():
    assert digits_to_bits(100) == 333
    assert digits_to_bits(30) == 100
