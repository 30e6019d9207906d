import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nahmsums import (
    DivergentProduct,
    DivisionByZeroSeries,
    NahmTriple,
    QSeries,
    eta,
    jacobi_partial_sum,
    nahm_sum,
    pochhammer,
    theta5,
    verify_identity,
)
from nahmsums.qseries import INF, lattice_theta, nahm_box, qpow, s_series

ORDER = 30


# naive oracle: series as {Fraction exponent: int} truncated below a bound

def naive_mul(a, b, bound):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            if ea + eb < bound:
                out[ea + eb] = out.get(ea + eb, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def naive_product(exponents, bound):
    out = {F(0): 1}
    for e in exponents:
        out = naive_mul(out, {F(0): 1, F(e): -1}, bound)
    return out


def naive_inverse_poch(n, bound):
    # 1/(q)_n = prod_{k<=n} sum_j q^{kj}
    out = {F(0): 1}
    for k in range(1, n + 1):
        out = naive_mul(out, {F(k * j): 1 for j in range(bound // k + 1)}, bound)
    return out


def as_dict(s: QSeries):
    return dict(s.items())


def test_eta_matches_direct_product():
    s = F(1, 2)
    expected = naive_product([s * n for n in range(1, 2 * ORDER + 1)], ORDER)
    got = eta(s, ORDER).shift(-s / 24).truncate(ORDER - s / 24)
    assert as_dict(got) == {e: c for e, c in expected.items() if e < ORDER - s / 24}


def test_pochhammer_finite_and_shifted():
    got = pochhammer(F(1, 3), 1, 5, ORDER)
    assert as_dict(got) == naive_product([F(1, 3) + k for k in range(5)], ORDER)
    got = pochhammer(2, 3, INF, ORDER)
    assert as_dict(got) == naive_product([2 + 3 * k for k in range(ORDER)], ORDER)


def test_pochhammer_with_nonpositive_factors():
    # (q^-2; q)_2 = (1 - q^-2)(1 - q^-1)
    got = pochhammer(-2, 1, 2, 5)
    assert as_dict(got) == {F(-3): 1, F(-2): -1, F(-1): -1, F(0): 1}
    assert pochhammer(-2, 1, 4, 5) == QSeries.zero(5)
    with pytest.raises(DivergentProduct):
        pochhammer(1, 0, INF, 5)


def test_rogers_ramanujan_product():
    lhs = nahm_sum(NahmTriple.make(2, 0, 0), ORDER)
    rhs = naive_product([e for n in range(ORDER) for e in (5 * n + 1, 5 * n + 4)], ORDER)
    inv = QSeries.from_exponents(rhs, ORDER).inverse(ORDER)
    assert verify_identity(lhs, inv)


def test_euler_identity():
    # sum q^(n(n+1)/2)/(q)_n = (-q; q)_inf = (q^2; q^2)_inf / (q; q)_inf
    lhs = nahm_sum(NahmTriple.make(1, F(1, 2), 0), ORDER)
    rhs = pochhammer(2, 2, INF, ORDER) / pochhammer(1, 1, INF, ORDER)
    assert verify_identity(lhs, rhs)


@pytest.mark.parametrize("A, B, C", [
    ([[2, 1], [1, 1]], (0, F(1, 2)), F(-1, 7)),
    ([[F(3, 4), F(-1, 4)], [F(-1, 4), F(3, 4)]], (F(1, 4), F(-1, 4)), F(-1, 80)),
    ([[1, 0, F(1, 2)], [0, 2, 0], [F(1, 2), 0, 1]], (0, F(-1, 2), F(1, 3)), 0),
])
def test_nahm_sum_against_naive_box_sum(A, B, C):
    t = NahmTriple.make(A, B, C)
    order = 12
    expected = {}
    bound = 12
    for n in itertools.product(range(bound), repeat=t.rank):
        e = C + sum(F(A[i][j]) * n[i] * n[j] for i in range(t.rank) for j in range(t.rank)) / 2 \
            + sum(F(b) * k for b, k in zip(B, n))
        if e >= order:
            continue
        room = order - e  # relative exponents below this survive
        term = {F(0): 1}
        for k in n:
            term = naive_mul(term, naive_inverse_poch(k, math.ceil(room)), room)
        for x, c in term.items():
            expected[x + e] = expected.get(x + e, 0) + c
    expected = {x: c for x, c in expected.items() if c}
    assert as_dict(nahm_sum(t, order)) == expected


def test_nahm_box_prunes_exactly():
    t = NahmTriple.make([[2, 1], [1, 1]], (0, F(1, 2)), 0)
    box = set(nahm_box(t, 20))
    for n in itertools.product(range(10), repeat=2):
        e = n[0] ** 2 + n[0] * n[1] + F(n[1] ** 2, 2) + F(n[1], 2)
        assert (n in box) == (e < 20)


def test_theta5_definition():
    for j in (1, 2, F(3, 4), F(3, 2)):
        got = theta5(j, 1, ORDER)
        expected = {}
        for m in range(-20, 21):
            n = 2 * F(j) - 1 + 10 * m
            if n * n / 40 < ORDER:
                e = n * n / 40
                expected[e] = expected.get(e, 0) + (-1) ** (math.floor(n / 10) % 2)
        assert as_dict(got) == {e: c for e, c in expected.items() if c}


def test_lattice_theta_gives_eta_by_pentagonal_numbers():
    got = lattice_theta(F(3, 2), F(-1, 6), ORDER, alternating=True)
    assert verify_identity(got, eta(1, ORDER))


def test_jacobi_partial_sums():
    inv_euler = pochhammer(1, 1, INF, ORDER).inverse(ORDER)
    for n in (-3, 0, 2, 5):
        assert verify_identity(jacobi_partial_sum(n, "kl", ORDER), inv_euler)
        half = (qpow(F(n, 2)) + qpow(F(-n, 2))) * inv_euler
        assert verify_identity(jacobi_partial_sum(n, "kl-half", ORDER), half.truncate(ORDER))
    with pytest.raises(ValueError):
        jacobi_partial_sum(0, "nope", 5)


def test_s_series():
    got = s_series(2, 40)
    assert as_dict(got) == {F(3): 1, F(6): -1, F(10): 1, F(15): -1, F(21): 1, F(28): -1, F(36): 1}


# arithmetic ---------------------------------------------------------------

small = st.dictionaries(st.fractions(min_value=0, max_value=6, max_denominator=3),
                        st.integers(-4, 4), max_size=6)


@settings(max_examples=120, deadline=None)
@given(small, small)
def test_multiplication_matches_naive(a, b):
    sa, sb = QSeries.from_exponents(a, 10), QSeries.from_exponents(b, 10)
    prod = sa * sb
    # unknown terms start at q^10 in each factor
    lows = [min((k for k, v in x.items() if v), default=10) for x in (a, b)]
    assert prod.order == min(10 + lows[1], 10 + lows[0])
    expected = naive_mul({k: v for k, v in a.items() if v}, {k: v for k, v in b.items() if v}, prod.order)
    assert as_dict(prod) == expected


@settings(max_examples=80, deadline=None)
@given(small)
def test_inverse_round_trip(a):
    a = dict(a)
    a[F(0)] = 1 if a.get(F(0), 0) == 0 else a[F(0)]
    s = QSeries.from_exponents(a, 8)
    one = s * s.inverse()
    assert verify_identity(one, QSeries.constant(1, one.order))


def test_order_tracking():
    a = QSeries.from_exponents({0: 1, 1: 1}, 5)
    b = QSeries.from_exponents({2: 1}, 7)
    assert (a + b).order == 5
    assert (a * b).order == 7
    assert (a * qpow(3)).order == 8
    assert a.scale_q(F(1, 2)).order == F(5, 2)
    assert a.shift(-1).order == 4
    with pytest.raises(ValueError):
        a.coefficient(5)


def test_division_and_errors():
    num = QSeries.from_exponents({1: 1}, 10)
    den = QSeries.from_exponents({0: 1, 1: -1}, 10)
    q = num / den
    assert as_dict(q) == {F(k): 1 for k in range(1, 10)}
    with pytest.raises(DivisionByZeroSeries):
        num / QSeries.zero(10)
    with pytest.raises(DivisionByZeroSeries):
        num / 0
    with pytest.raises(ValueError):
        QSeries.from_exponents({0: 1, 1: 1}).inverse()


def test_fractional_exponents_and_scaling():
    s = QSeries.from_exponents({F(1, 3): 2, F(5, 2): -1}, 4)
    assert s.scale_q(6) == QSeries.from_exponents({2: 2, 15: -1}, 24)
    assert s.coefficient(F(1, 3)) == 2
    assert s.coefficient(F(1, 5)) == 0


def test_json_round_trip():
    s = QSeries.from_exponents({F(-1, 6): 3, F(7, 4): F(-2, 5)}, F(9, 2))
    assert QSeries.from_json(s.to_json()) == s
    e = QSeries.from_exponents({1: 1})
    assert QSeries.from_json(e.to_json()) == e


def test_verify_identity_reports_first_mismatch():
    a = QSeries.from_exponents({0: 1, F(1, 2): 2, 3: 1}, 6)
    b = QSeries.from_exponents({0: 1, F(1, 2): 2, 3: 5}, 5)
    v = verify_identity(a, b)
    assert not v
    assert v.first_mismatch == (F(3), 1, 5)
    assert v.match_order == 3
    ok = verify_identity(a.truncate(3), b)
    assert ok and ok.match_order == 3
