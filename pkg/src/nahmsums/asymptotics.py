"""Asymptotics of Nahm sums at q = e^(-eps), eps -> 0.

The expansion has the shape

    F(e^-eps) e^(-alpha/eps) ~ beta e^(-gamma eps) (1 + sum_p c_p eps^p)

with alpha, beta, gamma read off the positive solution Q of Nahm's equations
and c_p the Gaussian expectation (covariance Atilde^-1) of a polynomial C_2p
assembled from per-coordinate polynomials D_k(B, X, T).

The D_k are built exactly over Q.  For numerical work the engine substitutes
X = xi_i (and optionally B_i) coordinate by coordinate, multiplies the per
coordinate generating series sum_k D_k s^k, and integrates monomials with
memoised Gaussian moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

import mpmath
from mpmath import mp

from .errors import DomainError, NotPositiveDefinite
from .numerics import (
    DEFAULT_PREC,
    GUARD_BITS,
    bernoulli_number,
    check_prec,
    eval_li,
    p_coefficients,
    rogers_L,
    to_mp,
)
from .polynomial import MultiPoly
from .qseries import nahm_box, nahm_exponent
from .system import NahmTriple, PositiveSolution, solve_positive

# ---------------------------------------------------------------------------
# exact polynomials
# ---------------------------------------------------------------------------


def p_polynomial(r: int) -> MultiPoly:
    """P_r(X): P_1 = X, P_{r+1} = (X^2 + X) P_r'."""
    return MultiPoly.univariate([Fraction(c) for c in p_coefficients(r)], "X")


class HalfPowerSeries:
    """Truncated series in eps^(1/2) with polynomial coefficients.

    ``coeffs[n]`` is the coefficient of eps^(n/2); indices above ``order`` are
    discarded.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: dict[int, MultiPoly], order: int):
        self.order = order
        self.coeffs = {n: c for n, c in coeffs.items() if n <= order and not c.is_zero()}

    def coefficient(self, power) -> MultiPoly | int:
        """Coefficient of eps^power (power a half-integer)."""
        n = Fraction(power) * 2
        if n.denominator != 1:
            raise ValueError("powers are half-integers")
        return self.coeffs.get(int(n), 0)

    def __add__(self, other: "HalfPowerSeries") -> "HalfPowerSeries":
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out[n] + c if n in out else c
        return HalfPowerSeries(out, min(self.order, other.order))

    def __mul__(self, other: "HalfPowerSeries") -> "HalfPowerSeries":
        order = min(self.order, other.order)
        out: dict[int, MultiPoly] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                if i + j <= order:
                    out[i + j] = out[i + j] + a * b if i + j in out else a * b
        return HalfPowerSeries(out, order)

    def exp(self) -> "HalfPowerSeries":
        """exp of a series without constant term, via n e_n = sum_k k g_k e_(n-k)."""
        if 0 in self.coeffs:
            raise ValueError("exp needs a vanishing constant term")
        variables = next(iter(self.coeffs.values())).variables if self.coeffs else ()
        e = [MultiPoly.constant(Fraction(1), variables)]
        for n in range(1, self.order + 1):
            acc = MultiPoly(variables)
            for k in range(1, n + 1):
                g = self.coeffs.get(k)
                if g is not None:
                    acc = acc + g * e[n - k] * k
            e.append(acc * Fraction(1, n))
        return HalfPowerSeries(dict(enumerate(e)), self.order)


_DVARS = ("B", "X", "T")


@lru_cache(maxsize=None)
def _d_polynomials(P: int) -> tuple[MultiPoly, ...]:
    B = MultiPoly.var("B", _DVARS)
    X = MultiPoly.var("X", _DVARS)
    T = MultiPoly.var("T", _DVARS)
    exponent: dict[int, MultiPoly] = {1: (B + X * Fraction(1, 2)) * T}
    # B_p(T/s) s^(2p-2) = sum_k C(p,k) B_k T^(p-k) s^(p+k-2)
    for p in range(3, P + 3):
        lip = MultiPoly.univariate([Fraction(c) for c in p_coefficients(p - 1)], "X").with_variables(_DVARS)
        scale = Fraction(1, math.factorial(p))
        for k in range(p + 1):
            n = p + k - 2
            bk = bernoulli_number(k)
            if n > P or bk == 0:
                continue
            term = lip * T ** (p - k) * (-scale * math.comb(p, k) * bk)
            exponent[n] = exponent[n] + term if n in exponent else term
    series = HalfPowerSeries(exponent, P).exp()
    return tuple(series.coeffs.get(n, MultiPoly(_DVARS)) for n in range(1, P + 1))


def d_polynomials(P: int) -> list[MultiPoly]:
    """[D_1, ..., D_P] as exact polynomials in (B, X, T)."""
    if P < 1:
        raise ValueError("P must be >= 1")
    return list(_d_polynomials(P))


def c_polynomial(p: int, r: int) -> MultiPoly:
    """C_p in B_i, xi_i, t_i: sum over compositions p_1 + ... + p_r = p (parts >= 0, D_0 = 1)."""
    if p < 1 or r < 1:
        raise ValueError("p and r must be >= 1")
    D = d_polynomials(p)
    names = [f"{v}_{i}" for i in range(1, r + 1) for v in ("B", "xi", "t")]
    local = []
    for i in range(1, r + 1):
        ren = {"B": f"B_{i}", "X": f"xi_{i}", "T": f"t_{i}"}
        one = MultiPoly.constant(Fraction(1), names)
        local.append([one] + [d.rename(ren).with_variables(names) for d in D])
    # partial[k] = sum over compositions of k into the coordinates seen so far
    partial = local[0][: p + 1]
    for i in range(1, r):
        partial = [
            sum((partial[a] * local[i][k - a] for a in range(k + 1)), MultiPoly(names))
            for k in range(p + 1)
        ]
    return partial[p]


# ---------------------------------------------------------------------------
# Gaussian moments
# ---------------------------------------------------------------------------


class _MomentTable:
    """E[t^a] for t ~ N(0, Sigma), memoised.

    Expanding along the first nonzero index i (Isserlis):
    E[t^a] = sum_j Sigma_ij (a - e_i)_j E[t^(a - e_i - e_j)].
    """

    def __init__(self, Sigma):
        self.S = Sigma
        self.r = len(Sigma)
        self.memo: dict[tuple[int, ...], Any] = {(0,) * self.r: mpmath.mpf(1)}

    def __call__(self, a: tuple[int, ...]):
        if sum(a) % 2:
            return 0
        hit = self.memo.get(a)
        if hit is not None:
            return hit
        i = next(k for k, v in enumerate(a) if v)
        rest = list(a)
        rest[i] -= 1
        total = 0
        for j in range(self.r):
            if rest[j]:
                mult = rest[j]
                rest[j] -= 1
                total += self.S[i][j] * mult * self(tuple(rest))
                rest[j] += 1
        self.memo[a] = total
        return total


def _as_square(Sigma) -> list[list]:
    if isinstance(Sigma, mpmath.matrix):
        return [[Sigma[i, j] for j in range(Sigma.cols)] for i in range(Sigma.rows)]
    rows = [list(r) for r in Sigma]
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("Sigma must be square")
    return [[to_mp(v) for v in r] for r in rows]


def _check_spd(S: list[list]) -> None:
    n = len(S)
    for i in range(n):
        for j in range(i):
            if abs(S[i][j] - S[j][i]) > mpmath.ldexp(1, -mp.prec + 8) * (1 + abs(S[i][j])):
                raise NotPositiveDefinite("covariance matrix is not symmetric")
    try:
        mpmath.cholesky(mpmath.matrix(S))
    except ValueError:
        raise NotPositiveDefinite("covariance matrix is not positive definite") from None


def gaussian_moment(a: Sequence[int], Sigma, prec: int = DEFAULT_PREC):
    """E[t_1^a_1 ... t_r^a_r] for a centred Gaussian with covariance Sigma."""
    check_prec(prec)
    a = tuple(int(v) for v in a)
    if any(v < 0 for v in a):
        raise ValueError("exponents must be >= 0")
    with mp.workprec(prec + GUARD_BITS):
        S = _as_square(Sigma)
        if len(S) != len(a):
            raise ValueError("exponent vector and Sigma disagree in size")
        _check_spd(S)
        value = _MomentTable(S)(a)
    with mp.workprec(prec):
        return +mpmath.mpf(value)


# ---------------------------------------------------------------------------
# c_p engine
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _grouped_d(P: int) -> tuple[dict, ...]:
    """D_k regrouped as {(eB, eT): [(eX, coeff)]} for fast substitution."""
    out = []
    for d in _d_polynomials(P):
        groups: dict[tuple[int, int], list] = {}
        for (eb, ex, et), c in d.terms.items():
            groups.setdefault((eb, et), []).append((ex, c))
        out.append(groups)
    return tuple(out)


def _coordinate_polys(P2: int, xi, b) -> list[dict]:
    """D_1..D_P2 at X = xi (and B = b unless b is None) keyed by (eB, eT)."""
    xpow = [mpmath.mpf(1)]
    for _ in range(3 * P2):
        xpow.append(xpow[-1] * xi)
    bpow = None
    if b is not None:
        bpow = [mpmath.mpf(1)]
        for _ in range(P2):
            bpow.append(bpow[-1] * b)
    polys = []
    for groups in _grouped_d(P2):
        poly: dict[tuple[int, int], Any] = {}
        for (eb, et), parts in groups.items():
            v = sum(xpow[ex] * (mpmath.mpf(c.numerator) / c.denominator) for ex, c in parts)
            if bpow is not None:
                v *= bpow[eb]
                eb = 0
            key = (eb, et)
            poly[key] = poly.get(key, 0) + v
        polys.append(poly)
    return polys


def _cp_engine(xi: Sequence, Sigma: list[list], P: int, B: Sequence | None) -> list[dict]:
    """c_1..c_P as {B-exponent tuple: value}; with numeric B the only key is ()."""
    r = len(xi)
    P2 = 2 * P
    symbolic = B is None
    coords = [_coordinate_polys(P2, xi[i], None if symbolic else B[i]) for i in range(r)]
    # state: (s-degree, B exponents, t exponents) -> value
    state: dict[tuple, Any] = {(0, (), ()): mpmath.mpf(1)}
    for i, polys in enumerate(coords):
        remaining = r - i - 1
        nxt: dict[tuple, Any] = {}
        for (sd, be, te), val in state.items():
            key = (sd, be + (0,) if symbolic else be, te + (0,))
            nxt[key] = nxt.get(key, 0) + val
            for k in range(1, P2 - sd + 1):
                if remaining == 0 and (sd + k) % 2:
                    continue
                for (eb, et), c in polys[k - 1].items():
                    key = (sd + k, be + (eb,) if symbolic else be, te + (et,))
                    nxt[key] = nxt.get(key, 0) + val * c
        state = nxt
    moments = _MomentTable(Sigma)
    out: list[dict] = [dict() for _ in range(P)]
    for (sd, be, te), val in state.items():
        if sd == 0 or sd % 2:
            continue
        m = moments(te)
        if m:
            slot = out[sd // 2 - 1]
            slot[be] = slot.get(be, 0) + val * m
    return out


def _inverse(At) -> list[list]:
    inv = At ** -1
    return [[inv[i, j] for j in range(inv.cols)] for i in range(inv.rows)]


@dataclass
class AsymptoticExpansion:
    triple: NahmTriple
    alpha: Any
    beta: Any
    gamma: Any
    c: list
    solution: PositiveSolution
    det_Atilde: Any
    prec: int = DEFAULT_PREC

    @property
    def P(self) -> int:
        return len(self.c)

    def deviations(self) -> list:
        """|c_p - gamma^p / p!| for p = 1..P."""
        with mp.workprec(self.prec):
            return [abs(cp - self.gamma ** p / math.factorial(p)) for p, cp in enumerate(self.c, 1)]

    def log_approximation(self, eps, terms: int | None = None):
        """alpha/eps + log beta - gamma eps + log(1 + sum_{p<=terms} c_p eps^p)."""
        terms = self.P if terms is None else terms
        with mp.workprec(self.prec + GUARD_BITS):
            e = to_mp(eps)
            tail = 1 + sum(self.c[p - 1] * e ** p for p in range(1, terms + 1))
            value = self.alpha / e + mpmath.log(self.beta) - self.gamma * e + mpmath.log(tail)
        with mp.workprec(self.prec):
            return +value


def _solution_data(A, prec):
    # solve with extra bits so that Q is accurate to the working precision
    return solve_positive(A, prec + GUARD_BITS)


def expansion(triple: NahmTriple, P: int, prec: int = DEFAULT_PREC) -> AsymptoticExpansion:
    """alpha, beta, gamma and c_1..c_P for F_{A,B,C}(e^-eps)."""
    check_prec(prec)
    if P < 1:
        raise ValueError("P must be >= 1")
    r = triple.rank
    sol = _solution_data(triple.A, prec)
    with mp.workprec(prec + GUARD_BITS):
        Q = sol.Q
        At = sol.Atilde
        det = mpmath.det(At)
        alpha = sum(mpmath.pi ** 2 / 6 - rogers_L(q, prec + GUARD_BITS) for q in Q)
        beta = 1 / mpmath.sqrt(det)
        for q, b in zip(Q, triple.B):
            beta *= q ** to_mp(b) / mpmath.sqrt(1 - q)
        gamma = to_mp(triple.C) + sum((1 + q) / (1 - q) for q in Q) / 24
        B = [to_mp(b) for b in triple.B]
        raw = _cp_engine(sol.xi, _inverse(At), P, B)
        c = [slot.get((), mpmath.mpf(0)) for slot in raw]
    with mp.workprec(prec):
        return AsymptoticExpansion(
            triple=triple, alpha=+alpha, beta=+beta, gamma=+gamma, c=[+mpmath.mpf(v) for v in c],
            solution=sol, det_Atilde=+det, prec=prec,
        )


@dataclass
class BPolynomials:
    """c_p(B) for a fixed matrix A, as polynomials in B with numeric coefficients."""

    rank: int
    c: list[dict]  # c[p-1]: {B-exponent tuple: coefficient}
    solution: PositiveSolution
    prec: int

    def evaluate(self, p: int, B: Sequence):
        total = 0
        for exps, coeff in self.c[p - 1].items():
            term = coeff
            for b, e in zip(B, exps):
                if e:
                    term *= b ** e
            total += term
        return total

    def gradient(self, p: int, B: Sequence) -> list:
        grad = [0] * self.rank
        for exps, coeff in self.c[p - 1].items():
            for i, e in enumerate(exps):
                if e:
                    term = coeff * e
                    for j, (b, ej) in enumerate(zip(B, exps)):
                        k = ej - 1 if j == i else ej
                        if k:
                            term *= b ** k
                    grad[i] += term
        return grad


def c_polynomials_in_B(A, P: int, prec: int = DEFAULT_PREC) -> BPolynomials:
    """c_1..c_P as polynomials in B_1..B_r (numeric coefficients at ``prec``)."""
    check_prec(prec)
    sol = _solution_data(A, prec)
    with mp.workprec(prec + GUARD_BITS):
        raw = _cp_engine(sol.xi, _inverse(sol.Atilde), P, None)
    return BPolynomials(rank=len(sol.Q), c=raw, solution=sol, prec=prec)


# ---------------------------------------------------------------------------
# Pochhammer tail: inequality and expansion in (nu, eps)
# ---------------------------------------------------------------------------


def _partial_product(x, q, count=None, cut=None):
    """prod (1 - x q^k) for k < count, or while x q^k > cut."""
    prod = mpmath.mpf(1)
    k = 0
    while (count is None or k < count) and (cut is None or x > cut):
        prod *= 1 - x
        x *= q
        k += 1
    return prod


def log_pochhammer_tail(n: int, eps, prec: int = DEFAULT_PREC):
    """log((q)_inf / (q)_n) = sum_{s>=1} log(1 - q^(n+s)) at q = e^-eps.

    Summed directly while that takes a moderate number of terms; otherwise
    log (q)_inf comes from the eta transformation and only the finite product
    (q)_n is summed.
    """
    check_prec(prec)
    if n < 0:
        raise ValueError("n must be >= 0")
    with mp.workprec(prec + GUARD_BITS):
        e = to_mp(eps)
        if e <= 0:
            raise DomainError("eps must be positive")
        needed = (prec + GUARD_BITS) * math.log(2) / float(e)
        if needed < 2000:
            cut = mpmath.ldexp(1, -prec - GUARD_BITS)
            q = mpmath.exp(-e)
            value = mpmath.log(_partial_product(mpmath.exp(-e * (n + 1)), q, cut=cut))
        else:
            # (q)_inf = sqrt(2 pi / eps) exp(eps/24 - pi^2/(6 eps)) (q~)_inf, q~ = e^(-4 pi^2/eps)
            qt = mpmath.exp(-4 * mpmath.pi ** 2 / e)
            log_dual = mpmath.mpf(0)
            x = qt
            while x > mpmath.ldexp(1, -prec - GUARD_BITS):
                log_dual += mpmath.log1p(-x)
                x *= qt
            log_inf = mpmath.log(2 * mpmath.pi / e) / 2 + e / 24 - mpmath.pi ** 2 / (6 * e) + log_dual
            head = mpmath.log(_partial_product(mpmath.exp(-e), mpmath.exp(-e), count=n))
            value = log_inf - head
    with mp.workprec(prec):
        return +value


def pochhammer_tail_bound(Q, n: int, eps, prec: int = DEFAULT_PREC) -> tuple:
    """Both sides of the upper bound for log((q)_inf/(q)_n), nu = -log Q - n eps."""
    check_prec(prec)
    with mp.workprec(prec + GUARD_BITS):
        Qm, e = to_mp(Q), to_mp(eps)
        if not 0 < Qm < 1:
            raise DomainError("Q must lie in (0, 1)")
        nu = -mpmath.log(Qm) - n * e
        l1 = mpmath.log(1 - Qm)
        rhs = -eval_li(2, Qm, prec + GUARD_BITS) / e + (nu / e - mpmath.mpf(1) / 2) * l1 + nu / 2 * Qm / (1 - Qm)
        lhs = log_pochhammer_tail(n, e, prec + GUARD_BITS)
    with mp.workprec(prec):
        return +lhs, +rhs


@dataclass
class TailExpansion:
    """Truncation r + s <= N of  -sum Li_{2-r-s}(Q) B_r / (r! s!) nu^s eps^(r-1)."""

    Q: Any
    N: int
    terms: dict = field(default_factory=dict)  # (r, s) -> coefficient of nu^s eps^(r-1)
    prec: int = DEFAULT_PREC

    def term(self, r: int, s: int):
        return self.terms.get((r, s), 0)

    def __call__(self, nu, eps):
        with mp.workprec(self.prec + GUARD_BITS):
            v, e = to_mp(nu), to_mp(eps)
            value = sum(c * v ** s * e ** (r - 1) for (r, s), c in self.terms.items())
        with mp.workprec(self.prec):
            return +value


def pochhammer_tail_expansion(Q, N: int, prec: int = DEFAULT_PREC) -> TailExpansion:
    check_prec(prec)
    if N < 1:
        raise ValueError("N must be >= 1")
    terms = {}
    with mp.workprec(prec + GUARD_BITS):
        Qm = to_mp(Q)
        if not 0 < Qm < 1:
            raise DomainError("Q must lie in (0, 1)")
        li = {m: eval_li(2 - m, Qm, prec + GUARD_BITS) for m in range(N + 1)}
        for r in range(N + 1):
            br = bernoulli_number(r)
            if br == 0:
                continue
            for s in range(N - r + 1):
                coeff = -li[r + s] * (mpmath.mpf(br.numerator) / br.denominator)
                terms[(r, s)] = coeff / (math.factorial(r) * math.factorial(s))
    return TailExpansion(Q=Qm, N=N, terms=terms, prec=prec)


# ---------------------------------------------------------------------------
# direct evaluation of the Nahm sum at q = e^-eps
# ---------------------------------------------------------------------------


def direct_log_nahm_sum(triple: NahmTriple, eps, prec: int = DEFAULT_PREC, max_points: int = 2_000_000):
    """log F_{A,B,C}(e^-eps) by partial summation.

    Each term is at most exp(-eps E(n) + r pi^2/(6 eps)) and F >= q^C, so all
    n with eps E(n) beyond r pi^2/(6 eps) + (prec+16) log 2 + eps |C| are
    dropped (E(n) the exponent of q).
    """
    check_prec(prec)
    r = triple.rank
    with mp.workprec(prec + GUARD_BITS):
        e = to_mp(eps)
        if e <= 0:
            raise DomainError("eps must be positive")
        cut = (r * mpmath.pi ** 2 / (6 * e) + (prec + 16) * mpmath.log(2) + e * abs(to_mp(triple.C))) / e
        order = Fraction(int(mpmath.ceil(cut)) + 1)
        points = nahm_box(triple, order)
        if len(points) > max_points:
            raise DomainError(f"{len(points)} summation points exceed the cap {max_points}; use a larger eps")
        nmax = max((max(n) for n in points), default=0)
        q = mpmath.exp(-e)
        inv_poch = [mpmath.mpf(1)]
        acc = mpmath.mpf(1)
        qk = mpmath.mpf(1)
        for _ in range(nmax):
            qk *= q
            acc *= 1 - qk
            inv_poch.append(1 / acc)
        total = mpmath.mpf(0)
        for n in points:
            term = mpmath.exp(-e * to_mp(nahm_exponent(triple, n)))
            for k in n:
                term *= inv_poch[k]
            total += term
        value = mpmath.log(total)
    with mp.workprec(prec):
        return +value
