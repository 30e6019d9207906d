"""Arbitrary-precision special functions: polylogarithms of order <= 2, the
Rogers and Bloch-Wigner dilogarithms, Bernoulli numbers and rational
recognition.

All floating work runs on :mod:`mpmath` inside ``workprec`` blocks at
``prec + GUARD_BITS`` and is rounded to ``prec`` on return.  Inputs may be
ints, Fractions, floats, strings or mpmath numbers.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Any

import mpmath
from mpmath import mp

from .errors import DomainError, PrecisionError
from .polynomial import MultiPoly

DEFAULT_PREC = 256
GUARD_BITS = 32
MIN_PREC = 16
MAX_PREC = 1 << 16


def check_prec(prec: int) -> int:
    if not isinstance(prec, int) or prec < MIN_PREC or prec > MAX_PREC:
        raise PrecisionError(f"precision {prec!r} outside [{MIN_PREC}, {MAX_PREC}] bits")
    return prec


def to_mp(x: Any):
    """Convert ``x`` to an mpf/mpc at the current working precision."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return +x
    if isinstance(x, complex):
        return mpmath.mpc(x)
    return mpmath.mpmathify(x)


def _is_real(z) -> bool:
    return isinstance(z, mpmath.mpf) or (isinstance(z, mpmath.mpc) and z.imag == 0)


# ---------------------------------------------------------------------------
# Bernoulli numbers / polynomials
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple[Fraction, ...]:
    if n == 0:
        return (Fraction(1),)
    prev = _bernoulli_table(n - 1)
    s = sum(comb(n + 1, k) * prev[k] for k in range(n))
    return prev + (-s / (n + 1),)


def bernoulli_number(r: int) -> Fraction:
    """Exact Bernoulli number with the convention B_1 = -1/2."""
    if r < 0:
        raise ValueError("r must be >= 0")
    # grow the cache incrementally so the recursion depth stays small
    for k in range(0, r + 1, 200):
        _bernoulli_table(k)
    return _bernoulli_table(r)[r]


def bernoulli_polynomial(p: int) -> MultiPoly:
    """B_p(X) = sum_k C(p, k) B_k X^(p-k) as an exact polynomial in X."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return MultiPoly(("X",), {(p - k,): comb(p, k) * bernoulli_number(k) for k in range(p + 1)})


@lru_cache(maxsize=None)
def p_coefficients(r: int) -> tuple[int, ...]:
    """Dense integer coefficients of P_r(X), P_1 = X, P_{r+1} = (X^2 + X) P_r'."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if r == 1:
        return (0, 1)
    prev = p_coefficients(r - 1)
    deriv = [k * prev[k] for k in range(1, len(prev))]
    out = [0] * (len(deriv) + 2)
    for k, c in enumerate(deriv):
        out[k + 1] += c
        out[k + 2] += c
    return tuple(out)


def _horner(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# Polylogarithms
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _li2_bernoulli_coeffs(prec: int, count: int) -> tuple:
    with mp.workprec(prec):
        out = []
        fact = 1
        for n in range(count):
            fact *= n + 1
            b = bernoulli_number(n)
            out.append(mpmath.mpf(b.numerator) / (b.denominator * fact))
        return tuple(out)


def _li2_series(z):
    eps = mpmath.ldexp(1, -mp.prec - 4)
    total = 0
    power = z
    n = 1
    while True:
        term = power / (n * n)
        total += term
        if abs(power) < eps:
            return total
        n += 1
        power *= z


def _li2_debye(z):
    # sum_n B_n u^(n+1)/(n+1)!, u = -log(1-z); converges for |u| < 2*pi
    u = -mpmath.log(1 - z)
    eps = mpmath.ldexp(1, -mp.prec - 4)
    count = 64
    while True:
        coeffs = _li2_bernoulli_coeffs(mp.prec, count)
        total = 0
        power = u
        for n, c in enumerate(coeffs):
            term = c * power
            total += term
            if n > 2 and n % 2 == 0 and abs(term) < eps * (1 + abs(total)):
                return total
            power *= u
        count *= 2


def _li2(z):
    """Principal-branch dilogarithm at the current working precision."""
    if z == 0:
        return z * 0
    if z == 1:
        return mpmath.pi ** 2 / 6
    if _is_real(z) and mpmath.re(z) > 1:
        raise DomainError(f"Li_2 has a branch cut on (1, inf); got {z}")
    az = abs(z)
    if az > 1:
        # inversion: Li2(z) = -Li2(1/z) - pi^2/6 - log(-z)^2 / 2
        return -_li2(1 / z) - mpmath.pi ** 2 / 6 - mpmath.log(-z) ** 2 / 2
    if mpmath.re(z) > 0.5:
        # reflection: Li2(z) = pi^2/6 - log(z) log(1-z) - Li2(1-z)
        w = 1 - z
        return mpmath.pi ** 2 / 6 - mpmath.log(z) * mpmath.log(w) - _li2(w)
    if az <= 0.5:
        return _li2_series(z)
    return _li2_debye(z)


def _as_output(value, prec):
    with mp.workprec(prec):
        if isinstance(value, mpmath.mpc) and value.imag == 0:
            return +value.real
        return +value


def eval_li(m: int, z: Any, prec: int = DEFAULT_PREC):
    """Polylogarithm Li_m(z) for integer m <= 2.

    For m <= 0 the value is the rational function P_{1-m}(z/(1-z)); if ``z`` is a
    Fraction (or int) the result is an exact Fraction.  Real arguments give real
    results; the principal branch of log is used throughout.
    """
    if m > 2:
        raise ValueError("only orders m <= 2 are supported")
    check_prec(prec)
    if m <= 0:
        if isinstance(z, (int, Fraction)):
            z = Fraction(z)
            if z == 1:
                raise DomainError(f"Li_{m} has a pole at z = 1")
            return _horner(p_coefficients(1 - m), z / (1 - z))
        with mp.workprec(prec + GUARD_BITS):
            w = to_mp(z)
            if w == 1:
                raise DomainError(f"Li_{m} has a pole at z = 1")
            value = _horner(p_coefficients(1 - m), w / (1 - w))
        return _as_output(value, prec)
    with mp.workprec(prec + GUARD_BITS):
        w = to_mp(z)
        if m == 1:
            if w == 1:
                raise DomainError("Li_1 has a pole at z = 1")
            if _is_real(w) and mpmath.re(w) > 1:
                raise DomainError(f"Li_1 has a branch cut on (1, inf); got {w}")
            value = -mpmath.log(1 - w)
        else:
            value = _li2(w)
    return _as_output(value, prec)


def rogers_L(x: Any, prec: int = DEFAULT_PREC):
    """Rogers dilogarithm L(x) = Li_2(x) + log(x) log(1-x) / 2 on (0, 1]."""
    check_prec(prec)
    with mp.workprec(prec + GUARD_BITS):
        w = to_mp(x)
        if not _is_real(w):
            raise DomainError("rogers_L takes real arguments")
        w = mpmath.re(w)
        if not 0 < w <= 1:
            raise DomainError(f"rogers_L is defined on (0, 1]; got {w}")
        if w == 1:
            value = mpmath.pi ** 2 / 6
        else:
            value = _li2(w) + mpmath.log(w) * mpmath.log(1 - w) / 2
    return _as_output(value, prec)


def bloch_wigner_D(z: Any, prec: int = DEFAULT_PREC):
    """Bloch-Wigner dilogarithm D(z) = Im Li_2(z) + arg(1-z) log|z|."""
    check_prec(prec)
    with mp.workprec(prec + GUARD_BITS):
        w = mpmath.mpc(to_mp(z))
        if w == 0 or w == 1:
            raise DomainError("D(z) is undefined at z = 0 and z = 1")
        if w.imag == 0:
            value = mpmath.mpf(0)
        else:
            value = mpmath.im(_li2(w)) + mpmath.arg(1 - w) * mpmath.log(abs(w))
    return _as_output(value, prec)


# ---------------------------------------------------------------------------
# Rational recognition
# ---------------------------------------------------------------------------

def exact_fraction(x: Any) -> Fraction:
    """The exact binary value of a finite mpf (or any real number) as a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, mpmath.mpc):
        x = x.real
    if not isinstance(x, mpmath.mpf):
        x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError("non-finite value")
    sign, man, exp, _ = x._mpf_  # .man alone is unsigned
    man = -int(man) if sign else int(man)
    return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)


def convergents(x: Fraction):
    """Yield the continued-fraction convergents p/q of an exact rational."""
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    num, den = x.numerator, x.denominator
    while den:
        a, rem = divmod(num, den)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)
        num, den = den, rem


def recognize_rational(x: Any, max_den: int, prec: int = DEFAULT_PREC) -> Fraction | None:
    """Recover p/q (q <= max_den) from a high-precision approximation, or None.

    A convergent is accepted when it lies within 2^(-prec/2) of ``x`` and the
    next convergent's denominator exceeds 2^(prec/4) (a terminating expansion
    counts as an infinitely large next denominator).
    """
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    xf = exact_fraction(x)
    tol = Fraction(1, 2 ** (prec // 2))
    jump = 2 ** (prec // 4)
    convs = list(_bounded_convergents(xf, max_den))
    for i, c in enumerate(convs):
        if c.denominator > max_den:
            break
        if abs(xf - c) >= tol:
            continue
        nxt = convs[i + 1].denominator if i + 1 < len(convs) else None
        if nxt is None or nxt > jump:
            return c
    return None


def _bounded_convergents(x: Fraction, max_den: int):
    # stop one convergent past max_den: that one decides the acceptance test
    for c in convergents(x):
        yield c
        if c.denominator > max_den:
            return
