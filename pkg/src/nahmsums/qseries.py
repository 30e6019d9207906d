"""Exact truncated q-series with rational exponents.

A :class:`QSeries` states that *all* terms with exponent below ``order`` are
exactly the stored ones; terms at or above ``order`` are unknown.  Exact
(finite) series carry ``order = inf``.  Exponents are kept as integer
numerators over a per-series common denominator ``den``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Any, Iterable, Mapping, Sequence

from .errors import DivergentProduct, DivisionByZeroSeries
from .system import NahmTriple, as_matrix, format_rational, parse_rational

INF = math.inf


def _frac(x: Any) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _ceil_key(order, den: int):
    """Smallest integer k with k/den >= order (order may be inf)."""
    if order == INF:
        return None
    return math.ceil(_frac(order) * den)


class QSeries:
    __slots__ = ("den", "terms", "order")

    def __init__(self, den: int, terms: Mapping[int, Any], order=INF):
        if den < 1:
            raise ValueError("den must be positive")
        order = INF if order == INF else _frac(order)
        limit = _ceil_key(order, den)
        clean = {}
        for k, c in terms.items():
            if c != 0 and (limit is None or k < limit):
                clean[k] = _norm_coeff(c)
        # reduce the denominator when every exponent allows it
        g = den
        for k in clean:
            g = gcd(g, k)
            if g == 1:
                break
        if g > 1 and clean:
            clean = {k // g: c for k, c in clean.items()}
            den //= g
        elif not clean:
            den = 1
        self.den = den
        self.terms = clean
        self.order = order

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_exponents(cls, terms: Mapping[Any, Any] | Iterable, order=INF) -> "QSeries":
        items = list(terms.items() if isinstance(terms, Mapping) else terms)
        den = lcm(1, *(_frac(e).denominator for e, _ in items))
        if order != INF:
            den = lcm(den, _frac(order).denominator)
        out: dict[int, Any] = {}
        for e, c in items:
            k = int(_frac(e) * den)
            out[k] = out.get(k, 0) + c
        return cls(den, out, order)

    @classmethod
    def zero(cls, order=INF) -> "QSeries":
        return cls(1, {}, order)

    @classmethod
    def constant(cls, c, order=INF) -> "QSeries":
        return cls(1, {0: c}, order)

    @classmethod
    def monomial(cls, exponent, c=1, order=INF) -> "QSeries":
        return cls.from_exponents({_frac(exponent): c}, order)

    # -- inspection -------------------------------------------------------
    def items(self) -> list[tuple[Fraction, Any]]:
        return [(Fraction(k, self.den), c) for k, c in sorted(self.terms.items())]

    def exponents(self) -> list[Fraction]:
        return [e for e, _ in self.items()]

    def coefficient(self, exponent) -> Any:
        e = _frac(exponent)
        if self.order != INF and e >= self.order:
            raise ValueError(f"coefficient of q^{e} is unknown (order {self.order})")
        k = e * self.den
        if k.denominator != 1:
            return 0
        return self.terms.get(int(k), 0)

    def valuation(self) -> Fraction | None:
        if not self.terms:
            return None
        return Fraction(min(self.terms), self.den)

    def is_exact(self) -> bool:
        return self.order == INF

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        shown = []
        for e, c in self.items()[:8]:
            shown.append(f"{c}*q^{format_rational(e)}")
        tail = " + ..." if len(self.terms) > 8 else ""
        order = "" if self.order == INF else f" + O(q^{format_rational(self.order)})"
        return "QSeries(" + (" + ".join(shown) or "0") + tail + order + ")"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.order == other.order and self.items() == other.items()

    # -- helpers ----------------------------------------------------------
    def _rescaled(self, den: int) -> dict[int, Any]:
        f = den // self.den
        return {k * f: c for k, c in self.terms.items()}

    @staticmethod
    def _coerce(x: Any) -> "QSeries":
        if isinstance(x, QSeries):
            return x
        return QSeries.constant(x)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: Any) -> "QSeries":
        other = self._coerce(other)
        den = lcm(self.den, other.den)
        out = self._rescaled(den)
        for k, c in other._rescaled(den).items():
            out[k] = out.get(k, 0) + c
        return QSeries(den, out, min(self.order, other.order))

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries(self.den, {k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other: Any) -> "QSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "QSeries":
        return self._coerce(other) - self

    def _low(self):
        """Lower bound for the exponent of every term, known or not."""
        v = self.valuation()
        return v if v is not None else self.order

    def _product_order(self, other: "QSeries"):
        return min(self.order + other._low(), other.order + self._low())

    def __mul__(self, other: Any) -> "QSeries":
        if not isinstance(other, QSeries):
            return QSeries(self.den, {k: c * other for k, c in self.terms.items()}, self.order)
        order = self._product_order(other)
        den = lcm(self.den, other.den)
        if order != INF:
            den = lcm(den, _frac(order).denominator)
        limit = _ceil_key(order, den)
        a = sorted(self._rescaled(den).items())
        b = sorted(other._rescaled(den).items())
        out: dict[int, Any] = {}
        for ka, ca in a:
            for kb, cb in b:
                k = ka + kb
                if limit is not None and k >= limit:
                    break
                out[k] = out.get(k, 0) + ca * cb
        return QSeries(den, out, order)

    __rmul__ = __mul__

    def inverse(self, order=None) -> "QSeries":
        """1/self.  ``order`` bounds the result (required when self is exact)."""
        v = self.valuation()
        if v is None:
            raise DivisionByZeroSeries("series has no known nonzero term")
        kv = min(self.terms)
        inv_lead = _norm_coeff(Fraction(1) / self.terms[kv])
        rel = {k - kv: c for k, c in self.terms.items() if k != kv}
        if not rel and self.order == INF:
            return QSeries(self.den, {-kv: inv_lead}, INF)
        natural = self.order - 2 * v if self.order != INF else INF
        if order is not None:
            natural = min(natural, _frac(order))
        if natural == INF:
            raise ValueError("inverse of an exact non-monomial series needs an explicit order")
        den = lcm(self.den, _frac(natural).denominator)
        f = den // self.den
        rel = {k * f: c for k, c in rel.items()}
        step = 0
        for k in rel:
            step = gcd(step, k)
        step = step or 1
        limit = _ceil_key(natural + v, den)  # relative keys below this are needed
        inv = {0: inv_lead}
        support = sorted(rel.items())
        for j in range(step, max(limit, 0), step):
            acc = 0
            for i, c in support:
                if i > j:
                    break
                prev = inv.get(j - i)
                if prev:
                    acc += c * prev
            if acc:
                inv[j] = _norm_coeff(-acc * inv_lead)
        shift = kv * f
        return QSeries(den, {k - shift: c for k, c in inv.items()}, natural)

    def __truediv__(self, other: Any) -> "QSeries":
        if not isinstance(other, QSeries):
            if other == 0:
                raise DivisionByZeroSeries("division by zero scalar")
            return self * (Fraction(1) / _frac(other))
        vb = other.valuation()
        if vb is None:
            raise DivisionByZeroSeries("division by a series with no known nonzero term")
        if len(other.terms) == 1 and other.order == INF:
            return self * other.inverse()
        low_a = self._low()
        target = min(self.order - vb, other.order - 2 * vb + low_a)
        if target == INF:
            if low_a == INF:
                return QSeries.zero()
            raise ValueError("quotient of exact series needs a truncation order; truncate first")
        if low_a == INF:
            return QSeries.zero(target)
        inv = other.inverse(order=target - low_a)
        return (self * inv).truncate(target)

    def __rtruediv__(self, other: Any) -> "QSeries":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "QSeries":
        if n < 0:
            return (self ** (-n)).inverse()
        result = QSeries.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def truncate(self, order) -> "QSeries":
        if order == INF:
            return self
        return QSeries(self.den, self.terms, min(self.order, _frac(order)))

    def scale_q(self, s) -> "QSeries":
        """Substitute q -> q^s (exponents and order multiply by s)."""
        s = _frac(s)
        if s <= 0:
            raise ValueError("scale must be positive")
        den = self.den * s.denominator
        terms = {k * s.numerator: c for k, c in self.terms.items()}
        order = INF if self.order == INF else self.order * s
        return QSeries(den, terms, order)

    def shift(self, e) -> "QSeries":
        """Multiply by q^e exactly."""
        e = _frac(e)
        den = lcm(self.den, e.denominator)
        off = int(e * den)
        order = INF if self.order == INF else self.order + e
        return QSeries(den, {k + off: c for k, c in self._rescaled(den).items()}, order)

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        den = self.den
        if self.order != INF:
            den = lcm(den, self.order.denominator)
        return {
            "den": den,
            "order_num": None if self.order == INF else int(self.order * den),
            "terms": [[k * (den // self.den), format_rational(_frac(c))]
                      for k, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "QSeries":
        den = int(data["den"])
        order = INF if data.get("order_num") is None else Fraction(int(data["order_num"]), den)
        return cls(den, {int(k): parse_rational(c) for k, c in data["terms"]}, order)


def qpow(e) -> QSeries:
    return QSeries.monomial(e)


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------

def _euler_dense(length: int) -> list[int]:
    """Coefficients of prod_{n>=1}(1 - x^n) for exponents 0..length-1 (pentagonal numbers)."""
    out = [0] * length
    k = 0
    while True:
        any_in = False
        for m in ((k,) if k == 0 else (k, -k)):
            e = m * (3 * m - 1) // 2
            if e < length:
                out[e] += -1 if m % 2 else 1
                any_in = True
        if not any_in and k > 0:
            return out
        k += 1


def pochhammer(a_exponent, step, n, order) -> QSeries:
    """(q^a; q^step)_n = prod_{k<n} (1 - q^(a + k*step)), truncated at ``order``.

    ``n`` may be ``math.inf``.  (q; q)_inf and its rescalings use the pentagonal
    number theorem.
    """
    a = _frac(a_exponent)
    step = _frac(step)
    order = _frac(order)
    infinite = n == INF or n is None
    if infinite:
        if step <= 0:
            raise DivergentProduct("infinite product needs a positive step")
    elif n < 0:
        raise ValueError("n must be >= 0 or inf")
    if infinite and a == step:
        length = math.ceil(order / step)
        dense = _euler_dense(max(length, 1))
        return QSeries.from_exponents({k * step: c for k, c in enumerate(dense) if c}, order)
    # factors with non-positive exponent are finite in number; handle them exactly
    neg = []
    k = 0
    while (infinite or k < n) and a + k * step <= 0:
        if step <= 0 and infinite:
            raise DivergentProduct("factors never reach positive exponents")
        neg.append(a + k * step)
        k += 1
        if step <= 0 and not infinite and k >= n:
            break
    if any(e == 0 for e in neg):
        return QSeries.zero(order)
    low = sum(neg)  # valuation of the product
    result = QSeries.constant(1, order - low)
    rel_limit = order - low
    while infinite or k < n:
        e = a + k * step
        if e >= rel_limit:
            if infinite or step >= 0:
                break
            k += 1
            continue
        result = result - result.shift(e).truncate(rel_limit)
        k += 1
    finite = QSeries.constant(1)
    for e in neg:
        finite = finite - finite.shift(e)
    return (result * finite).truncate(order)


def inverse_q_pochhammer_dense(nmax: int, length: int) -> list[list[int]]:
    """Dense integer coefficients of 1/(q)_n for n = 0..nmax, exponents < length."""
    rows = [[1] + [0] * (length - 1)]
    for n in range(1, nmax + 1):
        cur = list(rows[-1])
        for j in range(n, length):
            cur[j] += cur[j - n]
        rows.append(cur)
    return rows


# ---------------------------------------------------------------------------
# Nahm sums
# ---------------------------------------------------------------------------

def _solve_sym(M: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(M)
    aug = [list(M[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c] / aug[c][c]
                for j in range(c, n + 1):
                    aug[i][j] -= f * aug[c][j]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def _tail_minimum(A, B, C, prefix: Sequence[int]) -> Fraction:
    """Exact real minimum over the free coordinates of E(n) with ``prefix`` fixed."""
    r = len(A)
    k = len(prefix)
    val = C
    for i in range(k):
        val += Fraction(A[i][i], 2) * prefix[i] ** 2 + B[i] * prefix[i]
        for j in range(i):
            val += A[i][j] * prefix[i] * prefix[j]
    if k == r:
        return val
    g = [B[i] + sum(A[i][j] * prefix[j] for j in range(k)) for i in range(k, r)]
    sub = [[A[i][j] for j in range(k, r)] for i in range(k, r)]
    y = _solve_sym(sub, g)
    return val - sum(gi * yi for gi, yi in zip(g, y)) / 2


def nahm_box(triple: NahmTriple, order) -> list[tuple[int, ...]]:
    """All n in Z_{>=0}^r with E(n) = n^T A n/2 + n^T B + C below ``order``.

    Coordinates are enumerated depth-first; a branch is pruned as soon as the
    exact real minimum of E over the remaining coordinates reaches ``order``.
    """
    A, B, C = triple.A, triple.B, triple.C
    r = triple.rank
    order = _frac(order)
    out = []

    def rec(prefix: list[int]):
        k = len(prefix)
        if k == r:
            out.append(tuple(prefix))
            return
        # the restricted minimum is a convex quadratic in n_k: walk until past the
        # vertex and above the order
        m = 0
        prev = None
        while True:
            h = _tail_minimum(A, B, C, prefix + [m])
            if h < order:
                rec(prefix + [m])
            elif prev is not None and h >= prev:
                break
            elif prev is None and _tail_minimum(A, B, C, prefix + [m + 1]) >= h:
                break
            prev = h
            m += 1

    rec([])
    return out


def nahm_exponent(triple: NahmTriple, n: Sequence[int]) -> Fraction:
    return _tail_minimum(triple.A, triple.B, triple.C, list(n))


def nahm_sum(triple: NahmTriple, order) -> QSeries:
    """F_{A,B,C}(q) = sum_n q^(n^T A n/2 + n^T B + C) / prod (q)_{n_i}, truncated."""
    order = _frac(order)
    box = nahm_box(triple, order)
    if not box:
        return QSeries.zero(order)
    exps = [nahm_exponent(triple, n) for n in box]
    emin = min(exps)
    length = math.ceil(order - emin)
    nmax = max(max(n) for n in box)
    inv = inverse_q_pochhammer_dense(nmax, max(length, 1))
    den = lcm(order.denominator, *(e.denominator for e in exps))
    acc: dict[int, int] = {}
    for n, e in zip(box, exps):
        L = math.ceil(order - e)
        prod = inv[n[0]][:L]
        for ni in n[1:]:
            other = inv[ni]
            new = [0] * L
            for i, ci in enumerate(prod):
                if ci:
                    for j in range(L - i):
                        cj = other[j]
                        if cj:
                            new[i + j] += ci * cj
            prod = new
        base = int(e * den)
        for j, c in enumerate(prod):
            if c:
                k = base + j * den
                acc[k] = acc.get(k, 0) + c
    return QSeries(den, acc, order)


# ---------------------------------------------------------------------------
# eta and theta
# ---------------------------------------------------------------------------

def eta(scale, order) -> QSeries:
    """eta(scale*z) = q^(scale/24) prod_n (1 - q^(scale*n)) as a series in q."""
    s = _frac(scale)
    if s <= 0:
        raise ValueError("scale must be positive")
    order = _frac(order)
    lead = s / 24
    body = pochhammer(s, s, INF, order - lead)
    return body.shift(lead)


def _floor_div10(n: Fraction) -> int:
    return math.floor(n / 10)


def theta5(j, scale, order) -> QSeries:
    """theta_{5,j}(scale*z) = sum_{n in 2j-1+10Z} (-1)^floor(n/10) q^(scale*n^2/40)."""
    j = _frac(j)
    s = _frac(scale)
    if s <= 0:
        raise ValueError("scale must be positive")
    order = _frac(order)
    base = 2 * j - 1
    # n = base + 10m; exponent s*n^2/40 < order  <=>  |n| < sqrt(40*order/s)
    terms: dict[Fraction, int] = {}
    if order > 0:
        bound = math.isqrt(math.ceil(40 * order / s)) + 2
        mlo = math.floor((-bound - base) / 10) - 1
        mhi = math.ceil((bound - base) / 10) + 1
        for m in range(mlo, mhi + 1):
            n = base + 10 * m
            e = s * n * n / 40
            if e < order:
                terms[e] = terms.get(e, 0) + (-1) ** (_floor_div10(n) % 2)
    return QSeries.from_exponents(terms, order)


def lattice_theta(coeff, shift, order, alternating: bool = False) -> QSeries:
    """sum_{m in Z} (+-1)^m q^(coeff*(m + shift)^2); sign alternates when requested."""
    c = _frac(coeff)
    x = _frac(shift)
    order = _frac(order)
    if c <= 0:
        raise ValueError("coeff must be positive")
    terms: dict[Fraction, int] = {}
    if order > 0:
        bound = math.isqrt(math.ceil(order / c)) + 2
        for m in range(-bound - abs(math.floor(x)) - 1, bound + abs(math.ceil(x)) + 2):
            e = c * (m + x) ** 2
            if e < order:
                sign = -1 if (alternating and m % 2) else 1
                terms[e] = terms.get(e, 0) + sign
    return QSeries.from_exponents(terms, order)


# ---------------------------------------------------------------------------
# identity verification
# ---------------------------------------------------------------------------

@dataclass
class Verdict:
    matched: bool
    match_order: Any
    first_mismatch: tuple | None = None

    def __bool__(self) -> bool:
        return self.matched

    def to_json(self) -> dict:
        mo = None if self.match_order == INF else format_rational(self.match_order)
        mm = None
        if self.first_mismatch is not None:
            e, lc, rc = self.first_mismatch
            mm = [format_rational(e), format_rational(_frac(lc)), format_rational(_frac(rc))]
        return {"matched": self.matched, "match_order": mo, "first_mismatch": mm}


def verify_identity(lhs: QSeries, rhs: QSeries) -> Verdict:
    """Exact coefficient comparison below the common known order."""
    order = min(lhs.order, rhs.order)
    den = lcm(lhs.den, rhs.den)
    a = lhs._rescaled(den)
    b = rhs._rescaled(den)
    limit = _ceil_key(order, den)
    for k in sorted(set(a) | set(b)):
        if limit is not None and k >= limit:
            break
        ca, cb = a.get(k, 0), b.get(k, 0)
        if ca != cb:
            e = Fraction(k, den)
            return Verdict(False, e, (e, ca, cb))
    return Verdict(True, order)


# ---------------------------------------------------------------------------
# constrained double sums used as oracles for the Table-2 style identities
# ---------------------------------------------------------------------------

JACOBI_VARIANTS = ("kl", "kl-half", "kl+l")


def _jacobi_weight(variant: str, k: int, l: int) -> Fraction:
    if variant == "kl":
        return Fraction(k * l)
    if variant == "kl-half":
        return Fraction(2 * k * l - k - l, 2)
    if variant == "kl+l":
        return Fraction(k * l + l)
    raise ValueError(f"unknown variant {variant!r}; choose from {JACOBI_VARIANTS}")


def jacobi_partial_sum(n: int, variant: str, order) -> QSeries:
    """sum_{k - l = n; k, l >= 0} q^w(k, l) / ((q)_k (q)_l) for the chosen weight w."""
    order = _frac(order)
    pairs = []
    l = max(0, -n)
    while True:
        k = l + n
        w = _jacobi_weight(variant, k, l)
        if w >= order:
            # weights increase in l from here on
            if l > abs(n) + 2:
                break
        else:
            pairs.append((k, l, w))
        l += 1
        if l > 10 * (abs(n) + 2) + 4 * int(order) + 10:
            break
    if not pairs:
        return QSeries.zero(order)
    wmin = min(w for _, _, w in pairs)
    length = max(1, math.ceil(order - wmin))
    nmax = max(max(k, l) for k, l, _ in pairs)
    inv = inverse_q_pochhammer_dense(nmax, length)
    total = QSeries.zero(order)
    for k, l, w in pairs:
        L = math.ceil(order - w)
        prod = [0] * L
        for i in range(L):
            if inv[k][i]:
                for j in range(L - i):
                    prod[i + j] += inv[k][i] * inv[l][j]
        total = total + QSeries.from_exponents({w + i: c for i, c in enumerate(prod) if c}, order)
    return total


def s_series(n: int, order) -> QSeries:
    """s_n = sum_{k >= n} (-1)^k q^(k(k+1)/2)."""
    order = _frac(order)
    terms: dict[Fraction, int] = {}
    k = n
    while True:
        e = Fraction(k * (k + 1), 2)
        if e < order:
            terms[e] = terms.get(e, 0) + (-1) ** (k % 2)
        elif k >= 0:
            break
        k += 1
    return QSeries.from_exponents(terms, order)
