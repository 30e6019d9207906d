"""Nahm triples and solutions of Nahm's equations 1 - Q_i = prod_j Q_j^(A_ij).

The positive solution is found by damped Newton on the strictly convex
function f_A(x) = x^T A x / 2 + sum Li_2(exp(-x_i)), with Q_i = exp(-x_i).
Complex solution sets are produced for a small catalog of matrix families by
solving the branch-resolved polynomial system in y_j = Q_j^(1/d).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Any, Sequence

import mpmath
from mpmath import mp

from .errors import DomainError, NoConvergence, NotPositiveDefinite, UnsupportedFamily
from .numerics import DEFAULT_PREC, GUARD_BITS, _li2, bloch_wigner_D, check_prec, to_mp

Matrix = tuple[tuple[Fraction, ...], ...]


# ---------------------------------------------------------------------------
# rationals, matrices
# ---------------------------------------------------------------------------

def parse_rational(value: Any) -> Fraction:
    """Parse "p/q", "p", ints or Fractions.  Floats are rejected to avoid silent loss."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational; use a 'p/q' string")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def as_matrix(A: Any) -> Matrix:
    """Normalise a scalar, a vector-of-rows or a NahmTriple to a Fraction matrix."""
    if isinstance(A, NahmTriple):
        return A.A
    if isinstance(A, (int, Fraction, str)):
        return ((parse_rational(A),),)
    rows = tuple(tuple(parse_rational(v) for v in row) for row in A)
    n = len(rows)
    if n == 0 or any(len(row) != n for row in rows):
        raise ValueError("matrix must be square and non-empty")
    return rows


def leading_minors(A: Matrix) -> list[Fraction]:
    """Exact leading principal minors via fraction-free elimination."""
    n = len(A)
    M = [list(row) for row in A]
    minors = []
    det = Fraction(1)
    for k in range(n):
        pivot = M[k][k]
        if pivot == 0:
            # zero pivot => minor k+1 is zero; remaining minors are not needed
            minors.append(Fraction(0))
            return minors + [Fraction(0)] * (n - k - 1)
        det *= pivot
        minors.append(det)
        for i in range(k + 1, n):
            f = M[i][k] / pivot
            if f:
                for j in range(k, n):
                    M[i][j] -= f * M[k][j]
    return minors


def is_positive_definite(A: Matrix) -> bool:
    return all(m > 0 for m in leading_minors(A))


def is_symmetric(A: Matrix) -> bool:
    return all(A[i][j] == A[j][i] for i in range(len(A)) for j in range(i))


def check_positive_definite(A: Matrix) -> Matrix:
    if not is_symmetric(A):
        raise NotPositiveDefinite("matrix is not symmetric")
    if not is_positive_definite(A):
        raise NotPositiveDefinite(f"matrix {A} is not positive definite")
    return A


# ---------------------------------------------------------------------------
# triples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NahmTriple:
    A: Matrix
    B: tuple[Fraction, ...]
    C: Fraction

    def __post_init__(self):
        A = as_matrix(self.A)
        B = tuple(parse_rational(b) for b in self.B)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", parse_rational(self.C))
        if len(B) != len(A):
            raise ValueError(f"B has length {len(B)} but A is {len(A)}x{len(A)}")
        check_positive_definite(A)

    @classmethod
    def make(cls, A, B, C) -> "NahmTriple":
        if isinstance(B, (int, Fraction, str)):
            B = (B,)
        return cls(as_matrix(A), tuple(B), C)

    @property
    def rank(self) -> int:
        return len(self.A)

    def to_json(self) -> dict:
        return {
            "A": [[format_rational(v) for v in row] for row in self.A],
            "B": [format_rational(b) for b in self.B],
            "C": format_rational(self.C),
        }

    @classmethod
    def from_json(cls, data: dict) -> "NahmTriple":
        return cls.make(data["A"], data["B"], data["C"])

    @classmethod
    def load(cls, path: str | Path) -> "NahmTriple":
        return cls.from_json(json.loads(Path(path).read_text()))

    def __str__(self) -> str:
        A = "[" + ",".join("[" + ",".join(map(format_rational, r)) + "]" for r in self.A) + "]"
        B = "(" + ",".join(map(format_rational, self.B)) + ")"
        return f"(A={A}, B={B}, C={format_rational(self.C)})"


def load_matrix(path: str | Path) -> Matrix:
    """Read a matrix from JSON: either a bare list of rows or an object with key "A"."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data["A"]
    return check_positive_definite(as_matrix(data))


# ---------------------------------------------------------------------------
# positive solution
# ---------------------------------------------------------------------------

@dataclass
class PositiveSolution:
    Q: list
    xi: list
    Atilde: Any  # mpmath.matrix
    residual: Any
    iterations: int = 0
    prec: int = DEFAULT_PREC


def _f_A(A, x):
    r = len(x)
    quad = sum(A[i, j] * x[i] * x[j] for i in range(r) for j in range(r)) / 2
    return quad + sum(_li2(mpmath.exp(-xi)) for xi in x)


def _grad_hess(A, x):
    r = len(x)
    g = mpmath.matrix(r, 1)
    H = mpmath.matrix(r, r)
    for i in range(r):
        g[i] = sum(A[i, j] * x[j] for j in range(r)) + mpmath.log(-mpmath.expm1(-x[i]))
        for j in range(r):
            H[i, j] = A[i, j]
        H[i, i] += 1 / mpmath.expm1(x[i])
    return g, H


def _positive_residual(A, x):
    r = len(x)
    worst = mpmath.mpf(0)
    for i in range(r):
        rhs = mpmath.exp(-sum(A[i, j] * x[j] for j in range(r)))
        worst = max(worst, abs(-mpmath.expm1(-x[i]) - rhs))
    return worst


def solve_positive(
    A: Any,
    prec: int = DEFAULT_PREC,
    tol: Any = None,
    x0: Sequence | None = None,
    max_iter: int = 200,
) -> PositiveSolution:
    """Unique solution of Nahm's equations with all Q_i in (0, 1).

    Damped Newton in x_i = -log Q_i starting from ``x0`` (default all ones),
    halving the step until f_A decreases (Armijo) and the iterate stays in the
    open orthant.  ``tol`` defaults to 2^(-prec+48).
    """
    check_prec(prec)
    Aq = check_positive_definite(as_matrix(A))
    r = len(Aq)
    with mp.workprec(prec + GUARD_BITS):
        Am = mpmath.matrix([[to_mp(v) for v in row] for row in Aq])
        tol_mp = mpmath.ldexp(1, -prec + 48) if tol is None else to_mp(tol)
        x = [to_mp(v) for v in x0] if x0 is not None else [mpmath.mpf(1)] * r
        if any(v <= 0 for v in x):
            raise DomainError("starting point must lie in (0, inf)^r")
        noise = mpmath.ldexp(1, -prec)
        fx = _f_A(Am, x)
        it = 0
        for it in range(1, max_iter + 1):
            g, H = _grad_hess(Am, x)
            step = mpmath.lu_solve(H, -g)
            slope = sum(g[i] * step[i] for i in range(r))
            if -slope < noise * noise:
                break
            t = mpmath.mpf(1)
            while True:
                cand = [x[i] + t * step[i] for i in range(r)]
                if all(c > 0 for c in cand):
                    fc = _f_A(Am, cand)
                    # f differences vanish below rounding noise close to the optimum
                    if fc <= fx + t * slope / 4 or -slope < noise:
                        break
                t /= 2
                if t < noise:
                    raise NoConvergence("line search failed to decrease f_A")
            x, fx = cand, fc
            if max(abs(t * s) for s in step) < noise:
                break
        res = _positive_residual(Am, x)
        if res >= tol_mp:
            raise NoConvergence(f"residual {mpmath.nstr(res, 5)} above tolerance after {it} iterations")
        Q = [mpmath.exp(-v) for v in x]
        xi = [q / (1 - q) for q in Q]
        At = Am.copy()
        for i in range(r):
            At[i, i] += xi[i]
    with mp.workprec(prec):
        return PositiveSolution(
            Q=[+q for q in Q], xi=[+v for v in xi], Atilde=At * 1, residual=+res,
            iterations=it, prec=prec,
        )


def f_A(A: Any, x: Sequence, prec: int = DEFAULT_PREC):
    """The convex potential whose critical point gives the positive solution."""
    Aq = as_matrix(A)
    with mp.workprec(prec + GUARD_BITS):
        Am = mpmath.matrix([[to_mp(v) for v in row] for row in Aq])
        val = _f_A(Am, [to_mp(v) for v in x])
    with mp.workprec(prec):
        return +val


# ---------------------------------------------------------------------------
# residuals for complex solutions
# ---------------------------------------------------------------------------

def residual(A: Any, Q: Sequence, branch: Sequence[int] | None = None, prec: int = DEFAULT_PREC):
    """max_i |1 - Q_i - exp(sum_j A_ij (Log Q_j + 2 pi i branch_j))|."""
    Aq = as_matrix(A)
    r = len(Aq)
    if len(Q) != r:
        raise ValueError("Q has the wrong length")
    branch = [0] * r if branch is None else list(branch)
    with mp.workprec(prec + GUARD_BITS):
        Qm = [mpmath.mpc(to_mp(q)) for q in Q]
        if any(q == 0 for q in Qm):
            raise DomainError("Q_j = 0 is not allowed")
        logs = [mpmath.log(q) + 2j * mpmath.pi * k for q, k in zip(Qm, branch)]
        worst = mpmath.mpf(0)
        for i in range(r):
            s = sum(to_mp(Aq[i][j]) * logs[j] for j in range(r))
            worst = max(worst, abs(1 - Qm[i] - mpmath.exp(s)))
    with mp.workprec(prec):
        return +worst


# ---------------------------------------------------------------------------
# catalog families
# ---------------------------------------------------------------------------

class FamilyId(str, enum.Enum):
    OFF_DIAG_HALF = "off-diag-half"  # ((a, 1/2 - a), (1/2 - a, a))
    OFF_DIAG_TWO = "off-diag-two"    # ((a, 2 - a), (2 - a, a))
    OFF_DIAG_ONE = "off-diag-one"    # ((a, 1 - a), (1 - a, a))
    INTEGER_4X4 = "integer-4x4"

    @classmethod
    def parse(cls, name: "str | FamilyId") -> "FamilyId":
        if isinstance(name, FamilyId):
            return name
        key = name.strip().lower().replace("_", "-")
        aliases = {
            "offdiaghalf": cls.OFF_DIAG_HALF, "offdiagtwo": cls.OFF_DIAG_TWO,
            "offdiagone": cls.OFF_DIAG_ONE, "integer4x4": cls.INTEGER_4X4,
        }
        for member in cls:
            if member.value == key:
                return member
        if key.replace("-", "") in aliases:
            return aliases[key.replace("-", "")]
        raise UnsupportedFamily(f"unknown family {name!r}")


INTEGER_4X4_MATRIX: Matrix = as_matrix([[3, 1, 1, 0], [1, 3, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1]])

_OFF_DIAG_SUM = {
    FamilyId.OFF_DIAG_HALF: Fraction(1, 2),
    FamilyId.OFF_DIAG_TWO: Fraction(2),
    FamilyId.OFF_DIAG_ONE: Fraction(1),
}


def family_matrix(family: "FamilyId | str", a: Any = None) -> Matrix:
    family = FamilyId.parse(family)
    if family is FamilyId.INTEGER_4X4:
        return INTEGER_4X4_MATRIX
    if a is None:
        raise ValueError(f"family {family.value} needs the parameter a")
    a = parse_rational(a)
    b = _OFF_DIAG_SUM[family] - a
    return check_positive_definite(((a, b), (b, a)))


def identify_family(A: Any) -> tuple[FamilyId, Fraction | None]:
    """Find the catalog family containing ``A``, or raise UnsupportedFamily."""
    A = as_matrix(A)
    if A == INTEGER_4X4_MATRIX:
        return FamilyId.INTEGER_4X4, None
    if len(A) == 2 and A[0][0] == A[1][1] and A[0][1] == A[1][0]:
        total = A[0][0] + A[0][1]
        for fam, s in _OFF_DIAG_SUM.items():
            if total == s:
                return fam, A[0][0]
    raise UnsupportedFamily(f"matrix {A} is not in the solution catalog")


@dataclass
class SolutionSet:
    solutions: list            # list of lists of mpc
    family_tag: str
    branches: list = field(default_factory=list)    # integer branch vector per solution
    residuals: list = field(default_factory=list)
    labels: list = field(default_factory=list)      # optional per-solution type labels
    matrix: Matrix | None = None

    def __len__(self) -> int:
        return len(self.solutions)


def _common_denominator(A: Matrix) -> int:
    return lcm(*(v.denominator for row in A for v in row))


def _branch_from_root(y, Q, d: int) -> int:
    """k with y = exp((Log Q + 2 pi i k)/d)."""
    if d == 1:
        return 0
    phase = (mpmath.arg(y) * d - mpmath.arg(Q)) / (2 * mpmath.pi)
    return int(mpmath.nint(phase)) % d


def _solve_two_by_two(A: Matrix, prec: int):
    """All solutions of the y-system for a symmetric 2x2 rational matrix.

    With d the common denominator of A and M = d*A, Q_j = y_j^d turns the
    equations into 1 - y_i^d = prod_j y_j^(M_ij), cleared of negative powers.
    The resultant in y_2 gives a univariate polynomial in y_1.
    """
    import sympy

    d = _common_denominator(A)
    M = [[int(v * d) for v in row] for row in A]
    y1, y2 = sympy.symbols("y1 y2")
    ys = (y1, y2)
    eqs = []
    for i in range(2):
        lhs = 1 - ys[i] ** d
        pos = sympy.Integer(1)
        for j in range(2):
            if M[i][j] > 0:
                pos *= ys[j] ** M[i][j]
            elif M[i][j] < 0:
                lhs *= ys[j] ** (-M[i][j])
        eqs.append(sympy.expand(lhs - pos))
    res = sympy.Poly(sympy.resultant(eqs[0], eqs[1], y2), y1)
    # y1 = 0 never gives a solution with Q_1 != 0
    coeffs = [int(c) for c in res.all_coeffs()]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    p0 = sympy.Poly(eqs[0], y1, y2)
    f0 = sympy.lambdify((y1, y2), eqs[0], "mpmath")
    f1 = sympy.lambdify((y1, y2), eqs[1], "mpmath")
    jac = [[sympy.lambdify((y1, y2), sympy.diff(e, v), "mpmath") for v in ys] for e in eqs]

    work = prec + GUARD_BITS
    out = []
    with mp.workprec(work):
        roots1 = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * work, cleanup=True)
        for r1 in roots1:
            r1 = mpmath.mpc(r1)
            if abs(r1) < mpmath.ldexp(1, -work // 2):
                continue
            # candidate y2: roots of eq0(r1, y2) that also annihilate eq1
            coeffs_y2 = _univariate_coeffs(p0, r1)
            if len(coeffs_y2) <= 1:
                continue
            for r2 in mpmath.polyroots(coeffs_y2, maxsteps=400, extraprec=4 * work, cleanup=True):
                r2 = mpmath.mpc(r2)
                if abs(r2) < mpmath.ldexp(1, -work // 2):
                    continue
                scale = 1 + abs(r1) ** (d + sum(map(abs, M[1]))) + abs(r2) ** (d + sum(map(abs, M[1])))
                if abs(f1(r1, r2)) > mpmath.ldexp(1, -work // 3) * scale:
                    continue
                pt = _newton2(f0, f1, jac, r1, r2)
                if pt is not None:
                    out.append(pt)
    return d, out


def _univariate_coeffs(poly2, r1):
    """Coefficients (highest first) of poly2(r1, y2) as a polynomial in y2."""
    deg = poly2.degree(poly2.gens[1])
    coeffs = [mpmath.mpc(0)] * (deg + 1)
    for (e1, e2), c in poly2.terms():
        coeffs[deg - e2] += int(c) * r1 ** e1
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs.pop(0)
    return coeffs


def _newton2(f0, f1, jac, a, b, steps: int = 60):
    eps = mpmath.ldexp(1, -mp.prec + 8)
    for _ in range(steps):
        F = mpmath.matrix([f0(a, b), f1(a, b)])
        J = mpmath.matrix([[jac[0][0](a, b), jac[0][1](a, b)], [jac[1][0](a, b), jac[1][1](a, b)]])
        try:
            dx = mpmath.lu_solve(J, -F)
        except ZeroDivisionError:
            return None
        a, b = a + dx[0], b + dx[1]
        if max(abs(dx[0]), abs(dx[1])) < eps * (1 + abs(a) + abs(b)):
            return a, b
    return None


def _integer_4x4_solutions(prec: int):
    sols, labels = [], []
    with mp.workprec(prec + GUARD_BITS):
        for u in mpmath.polyroots([1, 0, 1, 0, -1], extraprec=prec, maxsteps=200):
            u = mpmath.mpc(u)
            sols.append([u, u, 1 / (1 + u), 1 / (1 + u)])
            labels.append("first")
        for u in mpmath.polyroots([1, 0, -1, 0, 1], extraprec=prec, maxsteps=200):
            u = mpmath.mpc(u)
            sols.append([u, -u, 1 / (1 + u), 1 / (1 - u)])
            labels.append("second")
    return sols, labels


def solve_family(family: "FamilyId | str", a: Any = None, prec: int = DEFAULT_PREC) -> SolutionSet:
    """All complex solutions of Nahm's equations for a catalog matrix.

    Each solution carries the integer branch vector k (one entry per
    coordinate) under which ``residual`` is evaluated.
    """
    check_prec(prec)
    family = FamilyId.parse(family)
    A = family_matrix(family, a)
    tol = mpmath.ldexp(1, -prec // 2)
    if family is FamilyId.INTEGER_4X4:
        sols, labels = _integer_4x4_solutions(prec)
        branches = [[0, 0, 0, 0] for _ in sols]
    else:
        d, ys = _solve_two_by_two(A, prec)
        with mp.workprec(prec + GUARD_BITS):
            cand = []
            for y in ys:
                Q = [yy ** d for yy in y]
                if any(abs(q) < tol or abs(q - 1) < tol for q in Q):
                    continue
                cand.append((Q, [_branch_from_root(yy, q, d) for yy, q in zip(y, Q)]))
            kept, seen = [], []
            for Q, k in cand:
                if all(max(abs(x - z) for x, z in zip(Q, S)) > tol for S in seen):
                    seen.append(Q)
                    kept.append((Q, k))
        sols = [Q for Q, _ in kept]
        branches = [k for _, k in kept]
        labels = [""] * len(sols)
    residuals = [residual(A, Q, k, prec=prec) for Q, k in zip(sols, branches)]
    bad = [r for r in residuals if r > tol]
    if bad:
        raise NoConvergence(f"family solutions failed residual check: {bad}")
    label = family.value if a is None else f"{family.value}(a={a})"
    with mp.workprec(prec):
        sols = [[+q for q in Q] for Q in sols]
    return SolutionSet(sols, label, branches, residuals, labels, matrix=A)


def bloch_regulator(solution: Sequence, prec: int = DEFAULT_PREC):
    """Sum of Bloch-Wigner dilogarithms D(Q_1) + ... + D(Q_r) for one embedding."""
    total = mpmath.mpf(0)
    with mp.workprec(prec + GUARD_BITS):
        for q in solution:
            total += bloch_wigner_D(q, prec=prec + GUARD_BITS)
    with mp.workprec(prec):
        return +total
