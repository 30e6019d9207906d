from fractions import Fraction as F

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from nahmsums import (
    DomainError,
    PrecisionError,
    bernoulli_number,
    bernoulli_polynomial,
    bloch_wigner_D,
    eval_li,
    recognize_rational,
    rogers_L,
)
from nahmsums.numerics import check_prec, convergents, exact_fraction, p_coefficients

PREC = 256


def close(a, b, bits=PREC - 8):
    with mp.workprec(PREC + 32):
        return abs(mpmath.mpmathify(a) - mpmath.mpmathify(b)) <= mpmath.ldexp(1, -bits) * (1 + abs(b))


def test_bernoulli_numbers_agree_with_sympy():
    for n in range(0, 40):
        expected = F(-1, 2) if n == 1 else F(str(sympy.bernoulli(n)))
        assert bernoulli_number(n) == expected


def test_bernoulli_polynomial_agrees_with_sympy():
    x = sympy.Symbol("x")
    for p in range(1, 9):
        poly = sympy.Poly(sympy.bernoulli(p, x), x)
        ours = bernoulli_polynomial(p)
        for (k,), c in poly.terms():
            assert ours.coefficient((k,)) == F(str(c))


def test_p_coefficients_first_cases():
    assert p_coefficients(1) == (0, 1)
    assert p_coefficients(2) == (0, 1, 1)
    assert p_coefficients(3) == (0, 1, 3, 2)


@pytest.mark.parametrize("z", [F(1, 3), F(-2, 5), F(9, 10), 0.75, -3, mpmath.mpc(0.3, 0.4),
                               mpmath.mpc(-1.5, 2), mpmath.mpc(0.5, 0.8660254037844386), mpmath.mpc(0.9, -0.6)])
def test_li2_matches_mpmath_polylog(z):
    with mp.workprec(PREC + 32):
        zz = mpmath.mpmathify(z) if not isinstance(z, F) else mpmath.mpf(z.numerator) / z.denominator
        expected = mpmath.polylog(2, zz)
    assert close(eval_li(2, z, PREC), expected)


@pytest.mark.parametrize("m", [1, 0, -1, -2, -4])
def test_low_order_polylogs_match_mpmath(m):
    with mp.workprec(PREC + 32):
        z = mpmath.mpf(3) / 7
        assert close(eval_li(m, z, PREC), mpmath.polylog(m, z))


def test_nonpositive_orders_are_exact_on_rationals():
    # Li_0(z) = z / (1 - z), Li_{-1}(z) = z / (1 - z)^2
    assert eval_li(0, F(1, 3)) == F(1, 2)
    assert eval_li(-1, F(1, 3)) == F(3, 4)


def test_li2_reflection_identity():
    with mp.workprec(PREC + 32):
        for x in (mpmath.mpf("0.1"), mpmath.mpf("0.37"), mpmath.mpf("0.8")):
            lhs = eval_li(2, x, PREC) + eval_li(2, 1 - x, PREC)
            rhs = mpmath.pi ** 2 / 6 - mpmath.log(x) * mpmath.log(1 - x)
            assert close(lhs, rhs)


def test_li2_precision_doubling_is_consistent():
    z = mpmath.mpc("0.45", "0.7")
    low = eval_li(2, z, 200)
    high = eval_li(2, z, 400)
    assert close(low, high, bits=190)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_li(2, 3)
    with pytest.raises(DomainError):
        eval_li(1, 1)
    with pytest.raises(DomainError):
        eval_li(0, F(1))
    with pytest.raises(DomainError):
        rogers_L(F(3, 2))
    with pytest.raises(DomainError):
        bloch_wigner_D(1)
    with pytest.raises(ValueError):
        eval_li(3, F(1, 2))


def test_precision_bounds():
    with pytest.raises(PrecisionError):
        check_prec(4)
    with pytest.raises(PrecisionError):
        eval_li(2, F(1, 2), prec=1 << 20)


def test_rogers_L_special_values():
    with mp.workprec(PREC + 32):
        pi2 = mpmath.pi ** 2
        assert close(rogers_L(1, PREC), pi2 / 6)
        assert close(rogers_L(F(1, 2), PREC), pi2 / 12)
        assert close(rogers_L((mpmath.sqrt(5) - 1) / 2, PREC), pi2 / 10)
        assert close(rogers_L((3 - mpmath.sqrt(5)) / 2, PREC), pi2 / 15)


def test_rogers_L_complement_relation():
    with mp.workprec(PREC + 32):
        x = mpmath.mpf("0.2345")
        assert close(rogers_L(x, PREC) + rogers_L(1 - x, PREC), mpmath.pi ** 2 / 6)


def test_bloch_wigner_against_independent_formula():
    with mp.workprec(PREC + 32):
        for z in (mpmath.mpc(0.5, 0.8660254037844386), mpmath.mpc(-2, 1), mpmath.mpc(0.3, -0.2)):
            expected = mpmath.im(mpmath.polylog(2, z)) + mpmath.arg(1 - z) * mpmath.log(abs(z))
            assert close(bloch_wigner_D(z, PREC), expected, bits=PREC - 16)


def test_bloch_wigner_symmetries():
    with mp.workprec(PREC + 32):
        z = mpmath.mpc("0.3", "1.1")
        D = bloch_wigner_D(z, PREC)
        assert close(bloch_wigner_D(1 / z, PREC), -D)
        assert close(bloch_wigner_D(1 - z, PREC), -D)
        assert close(bloch_wigner_D(mpmath.conj(z), PREC), -D)
    assert bloch_wigner_D(F(1, 2)) == 0


def test_exact_fraction_keeps_sign():
    assert exact_fraction(mpmath.mpf(-0.375)) == F(-3, 8)
    assert exact_fraction(mpmath.mpf(-12)) == F(-12)
    assert exact_fraction(mpmath.mpf(5) / 4) == F(5, 4)


def test_convergents_of_known_fraction():
    assert list(convergents(F(415, 93))) == [F(4), F(9, 2), F(58, 13), F(415, 93)]


def test_recognize_rational_rejects_irrationals():
    with mp.workprec(PREC + 32):
        assert recognize_rational(mpmath.pi, 1000, PREC) is None
        assert recognize_rational(mpmath.sqrt(2), 10 ** 6, PREC) is None
        # a rational with too large a denominator is not reported
        assert recognize_rational(mpmath.mpf(1) / 1009, 1000, PREC) is None


@settings(max_examples=500, deadline=None)
@given(st.integers(-10 ** 6, 10 ** 6), st.integers(1, 1000))
def test_recognize_rational_round_trip(num, den):
    with mp.workprec(PREC + 32):
        x = mpmath.mpf(num) / den + mpmath.ldexp(1, -PREC + 8)
    assert recognize_rational(x, 1000, PREC) == F(num, den)
