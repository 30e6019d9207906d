"""Screening pipelines: modularity screen, (B, C) search, Bloch audit and
reproduction of the catalog tables.

The screen is a necessary condition only.  A triple passing it is reported as
"Candidate"; identity verification against a closed form upgrades that to
"verified to order N", never to "modular".
"""

from __future__ import annotations

import csv
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import mpmath
from mpmath import mp

from .asymptotics import AsymptoticExpansion, c_polynomials_in_B, expansion
from .expr import evaluate
from .numerics import DEFAULT_PREC, GUARD_BITS, check_prec, recognize_rational, rogers_L, to_mp
from .qseries import INF, nahm_sum, verify_identity
from .system import (
    FamilyId,
    NahmTriple,
    SolutionSet,
    as_matrix,
    bloch_regulator,
    check_positive_definite,
    format_rational,
    identify_family,
    solve_family,
    solve_positive,
)
from .tables import CONJECTURAL, Row, table_rows

CANDIDATE = "Candidate"
REJECTED = "Rejected"
HOLDS = "Holds"
FAILS = "Fails"


@dataclass
class RunConfig:
    prec: int = DEFAULT_PREC
    P: int = 6
    order: int = 40
    max_den: int = 1000
    output: str | None = None
    threads: int = 1

    def __post_init__(self):
        check_prec(self.prec)
        for name in ("P", "order", "max_den", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Defaults, then NAHM_PREC, then explicit keyword overrides (None = unset)."""
        values: dict[str, Any] = {}
        env = os.environ.get("NAHM_PREC")
        if env:
            values["prec"] = int(env)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def decimal(x, prec: int) -> str:
    """Decimal string carrying about ``prec`` bits."""
    digits = max(5, int(prec * math.log10(2)))
    with mp.workprec(prec + GUARD_BITS):
        if isinstance(x, mpmath.mpc) or isinstance(x, complex):
            x = mpmath.mpc(x)
            return f"{mpmath.nstr(x.real, digits)}{'+' if x.imag >= 0 else '-'}{mpmath.nstr(abs(x.imag), digits)}i"
        return mpmath.nstr(mpmath.mpf(x), digits)


def _short(x) -> str:
    return mpmath.nstr(x, 8)


# ---------------------------------------------------------------------------
# modularity screen
# ---------------------------------------------------------------------------


@dataclass
class ScreenReport:
    triple: NahmTriple
    alpha_over_pi2: Fraction | None
    gamma: Any
    cp_deviations: list
    verdict: str
    rejected_at: tuple | None = None  # (p, deviation); p = 0 means alpha failed
    prec: int = DEFAULT_PREC
    threshold: Any = None

    @property
    def is_candidate(self) -> bool:
        return self.verdict == CANDIDATE

    def to_json(self) -> dict:
        rej = None
        if self.rejected_at is not None:
            p, dev = self.rejected_at
            rej = {"p": p, "deviation": None if dev is None else decimal(dev, 32)}
        return {
            "triple": self.triple.to_json(),
            "alpha_over_pi2": None if self.alpha_over_pi2 is None else format_rational(self.alpha_over_pi2),
            "gamma": decimal(self.gamma, self.prec),
            "cp_deviations": [decimal(d, 32) for d in self.cp_deviations],
            "threshold": decimal(self.threshold, 32),
            "verdict": self.verdict,
            "rejected_at": rej,
            "precision_bits": self.prec,
        }


def alpha_over_pi2(alpha, max_den: int, prec: int) -> Fraction | None:
    with mp.workprec(prec + GUARD_BITS):
        ratio = to_mp(alpha) / mpmath.pi ** 2
    return recognize_rational(ratio, max_den, prec)


def _judge(exp: AsymptoticExpansion, max_den: int):
    prec = exp.prec
    threshold = mpmath.ldexp(1, -(prec // 3))
    ratio = alpha_over_pi2(exp.alpha, max_den, prec)
    devs = exp.deviations()
    return ratio, devs, threshold


def screen_triple(triple: NahmTriple, config: RunConfig | None = None) -> ScreenReport:
    """Check alpha in pi^2 Q and c_p = gamma^p / p! for p <= P.

    Deviations between the threshold 2^(-prec/3) and 2^(-prec/6) are
    borderline: the whole screen is then repeated at twice the precision.
    """
    config = config or RunConfig()
    prec = config.prec
    while True:
        exp = expansion(triple, config.P, prec)
        ratio, devs, threshold = _judge(exp, config.max_den)
        worst = max(devs)
        borderline = threshold <= worst < mpmath.ldexp(1, -(prec // 6))
        if borderline and prec < 4 * config.prec:
            prec *= 2
            continue
        break
    rejected = None
    if ratio is None:
        rejected = (0, None)
    else:
        for p, d in enumerate(devs, 1):
            if d >= threshold:
                rejected = (p, d)
                break
    return ScreenReport(
        triple=triple, alpha_over_pi2=ratio, gamma=exp.gamma, cp_deviations=devs,
        verdict=CANDIDATE if rejected is None else REJECTED, rejected_at=rejected,
        prec=prec, threshold=threshold,
    )


# ---------------------------------------------------------------------------
# search for B and C given A
# ---------------------------------------------------------------------------


def _float_poly(poly: dict) -> list[tuple[float, tuple[int, ...]]]:
    return [(float(c), e) for e, c in poly.items()]


def _eval_float(terms, x):
    total = 0.0
    for c, e in terms:
        v = c
        for xi, k in zip(x, e):
            if k:
                v *= xi ** k
        total += v
    return total


def _grad_float(terms, x):
    g = [0.0] * len(x)
    for c, e in terms:
        for i, k in enumerate(e):
            if k:
                v = c * k
                for j, (xj, kj) in enumerate(zip(x, e)):
                    p = kj - 1 if j == i else kj
                    if p:
                        v *= xj ** p
                g[i] += v
    return g


def _solve_small(M: list[list], b: list) -> list | None:
    n = len(M)
    aug = [list(M[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        p = max(range(c, n), key=lambda i: abs(aug[i][c]))
        if aug[p][c] == 0:
            return None
        aug[c], aug[p] = aug[p], aug[c]
        for i in range(c + 1, n):
            f = aug[i][c] / aug[c][c]
            for j in range(c, n + 1):
                aug[i][j] -= f * aug[c][j]
    x = [0] * n
    for i in reversed(range(n)):
        x[i] = (aug[i][n] - sum(aug[i][j] * x[j] for j in range(i + 1, n))) / aug[i][i]
    return x


class _Residuals:
    """f_p(B) = c_p(B) - c_1(B)^p / p! for p = 2..K, with Jacobian."""

    def __init__(self, polys, K: int):
        self.polys = polys
        self.K = K
        self.float_terms = [_float_poly(polys.c[p]) for p in range(K)]

    def float_system(self, x):
        c1 = _eval_float(self.float_terms[0], x)
        g1 = _grad_float(self.float_terms[0], x)
        F, J = [], []
        for p in range(2, self.K + 1):
            cp = _eval_float(self.float_terms[p - 1], x)
            gp = _grad_float(self.float_terms[p - 1], x)
            fact = math.factorial(p)
            F.append(cp - c1 ** p / fact)
            J.append([gp[i] - p * c1 ** (p - 1) * g1[i] / fact for i in range(len(x))])
        return F, J

    def mp_system(self, x):
        c1 = self.polys.evaluate(1, x)
        g1 = self.polys.gradient(1, x)
        F, J = [], []
        for p in range(2, self.K + 1):
            fact = math.factorial(p)
            F.append(self.polys.evaluate(p, x) - c1 ** p / fact)
            gp = self.polys.gradient(p, x)
            J.append([gp[i] - p * c1 ** (p - 1) * g1[i] / fact for i in range(len(x))])
        return F, J


def _gauss_newton_step(F, J):
    r = len(J[0])
    JtJ = [[sum(J[k][i] * J[k][j] for k in range(len(F))) for j in range(r)] for i in range(r)]
    Jtf = [-sum(J[k][i] * F[k] for k in range(len(F))) for i in range(r)]
    return _solve_small(JtJ, Jtf)


def _float_descent(res: _Residuals, x0, iters: int = 60):
    x = list(x0)
    for _ in range(iters):
        F, J = res.float_system(x)
        norm = math.sqrt(sum(f * f for f in F))
        if norm < 1e-13:
            return x, norm
        step = _gauss_newton_step(F, J)
        if step is None:
            return x, norm
        t = 1.0
        while t > 1e-4:
            cand = [xi + t * si for xi, si in zip(x, step)]
            Fc, _ = res.float_system(cand)
            if math.sqrt(sum(f * f for f in Fc)) < norm:
                break
            t /= 2
        else:
            return x, norm
        x = cand
        if max(abs(v) for v in x) > 1e3:
            return x, math.inf
    F, _ = res.float_system(x)
    return x, math.sqrt(sum(f * f for f in F))


def _refine_mp(res: _Residuals, x, prec: int, iters: int = 40):
    with mp.workprec(prec + GUARD_BITS):
        x = [mpmath.mpf(v) for v in x]
        for _ in range(iters):
            F, J = res.mp_system(x)
            step = _gauss_newton_step(F, J)
            if step is None:
                break
            x = [xi + si for xi, si in zip(x, step)]
            if max(abs(s) for s in step) < mpmath.ldexp(1, -prec):
                break
        return x


def _recognize_vector(x, max_den: int, prec: int) -> tuple[Fraction, ...] | None:
    out = []
    for v in x:
        # a double root is only located to about half the working precision
        frac = recognize_rational(v, max_den, prec) or recognize_rational(v, max_den, prec // 2)
        if frac is None:
            return None
        out.append(frac)
    return tuple(out)


def search_B_C(A: Any, config: RunConfig | None = None, grid_step: Fraction = Fraction(1, 4),
               box: Fraction = Fraction(2)) -> list[tuple[tuple, Fraction, ScreenReport]]:
    """All (B, C) found for ``A`` by Newton from a grid of starting points.

    Solves c_p(B) = c_1(B)^p / p! for p = 2..r+2 (Gauss-Newton, float phase from
    each grid point then refinement at full precision), recognises B as
    rationals, sets C from c_1 = gamma, and keeps only triples that pass the
    screen again with P raised by two.
    """
    config = config or RunConfig()
    Aq = check_positive_definite(as_matrix(A))
    r = len(Aq)
    prec = config.prec
    sol = solve_positive(Aq, prec + GUARD_BITS)
    with mp.workprec(prec + GUARD_BITS):
        alpha = sum(mpmath.pi ** 2 / 6 - rogers_L(q, prec + GUARD_BITS) for q in sol.Q)
        shift = sum((1 + q) / (1 - q) for q in sol.Q) / 24
    if alpha_over_pi2(alpha, config.max_den, prec) is None:
        return []
    K = r + 2
    res = _Residuals(c_polynomials_in_B(Aq, K, prec), K)
    steps = int(2 * box / grid_step) + 1
    grid = [float(-box + k * grid_step) for k in range(steps)]
    seen_float: list[list[float]] = []
    found: dict[tuple, None] = {}
    for start in itertools.product(grid, repeat=r):
        x, norm = _float_descent(res, start)
        if not norm < 1e-8:
            continue
        if any(max(abs(a - b) for a, b in zip(x, y)) < 1e-6 for y in seen_float):
            continue
        seen_float.append(x)
        xm = _refine_mp(res, x, prec)
        B = _recognize_vector(xm, config.max_den, prec)
        if B is not None:
            found[B] = None
    higher = replace(config, P=config.P + 2)
    out = []
    for B in found:
        with mp.workprec(prec + GUARD_BITS):
            c1 = res.polys.evaluate(1, [to_mp(b) for b in B])
            C = recognize_rational(c1 - shift, config.max_den, prec)
        if C is None:
            continue
        report = screen_triple(NahmTriple.make(Aq, B, C), higher)
        if report.is_candidate:
            out.append((B, C, report))
    out.sort(key=lambda t: (t[0], t[1]))
    return out


# ---------------------------------------------------------------------------
# Bloch audit
# ---------------------------------------------------------------------------


@dataclass
class BlochAudit:
    matrix: Any
    family: FamilyId
    solutions: SolutionSet
    regulators: list
    condition_i: str
    witnesses: list[int] = field(default_factory=list)  # indices of non-torsion solutions
    tolerance: Any = None
    prec: int = DEFAULT_PREC

    def to_json(self) -> dict:
        sols = []
        for k, (Q, reg) in enumerate(zip(self.solutions.solutions, self.regulators)):
            entry = {"Q": [decimal(q, self.prec) for q in Q], "regulator": decimal(reg, self.prec),
                     "torsion_consistent": k not in self.witnesses}
            if self.solutions.labels:
                entry["type"] = self.solutions.labels[k]
            if self.solutions.branches:
                entry["branch"] = list(self.solutions.branches[k])
            sols.append(entry)
        return {
            "matrix": [[format_rational(v) for v in row] for row in self.matrix],
            "family": self.family.value,
            "condition_i": self.condition_i,
            "witnesses": self.witnesses,
            "tolerance": decimal(self.tolerance, 32),
            "solutions": sols,
        }


def bloch_audit(family: "FamilyId | str | None" = None, param: Any = None, config: RunConfig | None = None,
                A: Any = None) -> BlochAudit:
    """sum_i D(Q_i) at every catalog solution; condition (i) holds iff all vanish.

    Give either ``family`` (with ``param`` where the family needs one) or a
    matrix ``A`` that belongs to one of the catalog families.
    """
    config = config or RunConfig()
    if family is None:
        if A is None:
            raise ValueError("give a family or a matrix")
        family, param = identify_family(A)
    family = FamilyId.parse(family)
    sols = solve_family(family, param, config.prec)
    regs = [bloch_regulator(Q, config.prec) for Q in sols.solutions]
    tol = mpmath.ldexp(1, -(config.prec // 2))
    witnesses = [k for k, v in enumerate(regs) if abs(v) > tol]
    return BlochAudit(
        matrix=sols.matrix, family=family, solutions=sols, regulators=regs,
        condition_i=FAILS if witnesses else HOLDS, witnesses=witnesses, tolerance=tol, prec=config.prec,
    )


# ---------------------------------------------------------------------------
# table reproduction
# ---------------------------------------------------------------------------


@dataclass
class RowResult:
    row: Row
    screen: ScreenReport
    identity_matched: bool
    match_order: Any
    first_mismatch: tuple | None
    literal_matched: bool | None = None

    @property
    def passed(self) -> bool:
        return self.identity_matched and self.screen.is_candidate

    @property
    def label(self) -> str:
        if not self.passed:
            return "fail"
        order = format_rational(Fraction(self.match_order)) if self.match_order != INF else "inf"
        if self.row.status == CONJECTURAL:
            return f"{CONJECTURAL} to order {order}"
        return f"verified to order {order}"

    def to_json(self) -> dict:
        out = self.row.to_json()
        out.update({
            "pass": self.passed,
            "label": self.label,
            "screen": self.screen.verdict,
            "identity": self.identity_matched,
            "first_mismatch": None if self.first_mismatch is None
            else [format_rational(Fraction(v)) for v in self.first_mismatch],
        })
        if self.literal_matched is not None:
            out["literal_matches"] = self.literal_matched
        return out


def reproduce_row(row: Row, config: RunConfig) -> RowResult:
    lhs = nahm_sum(row.triple, config.order)
    verdict = verify_identity(lhs, evaluate(row.expression, config.order))
    literal = None
    if row.literal is not None:
        literal = verify_identity(lhs, evaluate(row.literal, config.order)).matched
    return RowResult(
        row=row, screen=screen_triple(row.triple, config), identity_matched=verdict.matched,
        match_order=verdict.match_order, first_mismatch=verdict.first_mismatch, literal_matched=literal,
    )


def _reproduce_job(args):
    row, config = args
    return reproduce_row(row, config)


def reproduce_tables(which: str | Sequence[str], config: RunConfig | None = None,
                     csv_path: str | Path | None = None) -> list[RowResult]:
    """Screen every row and verify its closed form; optionally write a CSV."""
    config = config or RunConfig()
    names = [which] if isinstance(which, str) else list(which)
    rows = [row for name in names for row in table_rows(name)]
    if config.threads > 1 and len(rows) > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(_reproduce_job, [(row, config) for row in rows]))
    else:
        results = [reproduce_row(row, config) for row in rows]
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["table", "A", "B", "C", "expression", "screen", "identity", "label", "flags"])
            for res in results:
                t = res.row.triple.to_json()
                w.writerow([res.row.table, t["A"], t["B"], t["C"], res.row.expression,
                            res.screen.verdict, res.identity_matched, res.label, "; ".join(res.row.flags)])
    return results
