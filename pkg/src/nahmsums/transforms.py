"""Two constructions producing new Nahm triples from old ones.

``tensor_transform`` (rank r -> m r) satisfies F'(q) = F(q^(1/m)).
``double_transform`` (rank r -> 2 r) satisfies
F'(q) = (eta(2z)/eta(z))^r F(q^2).

Kronecker products use the block layout: index a*r + i for block a in
0..m-1 and coordinate i in 0..r-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .qseries import INF, Verdict, eta, nahm_sum, verify_identity
from .system import NahmTriple, check_positive_definite


def l_vector(r: int) -> tuple[Fraction, ...]:
    """(2i - r - 1) / (2r) for i = 1..r."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return tuple(Fraction(2 * i - r - 1, 2 * r) for i in range(1, r + 1))


def tensor_transform(triple: NahmTriple, m: int) -> NahmTriple:
    """A' = I + E_m (x) (A - I), B' = l_{mr} + e_m (x) (B - l_r), C' = C/m."""
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    r = triple.rank
    A, B = triple.A, triple.B
    n = m * r
    Ap = [[Fraction(0)] * n for _ in range(n)]
    for a in range(m):
        for b in range(m):
            for i in range(r):
                for j in range(r):
                    Ap[a * r + i][b * r + j] = (A[i][j] - (i == j)) / m
    for k in range(n):
        Ap[k][k] += 1
    lr, lmr = l_vector(r), l_vector(n)
    Bp = [lmr[a * r + i] + (B[i] - lr[i]) / m for a in range(m) for i in range(r)]
    check_positive_definite(Ap)
    return NahmTriple.make(Ap, Bp, triple.C / m)


def double_transform(triple: NahmTriple) -> NahmTriple:
    """A' = [[2A, I], [I, I]], B' = (2B, 1/2, ..., 1/2), C' = 2C + r/24."""
    r = triple.rank
    n = 2 * r
    Ap = [[Fraction(0)] * n for _ in range(n)]
    for i in range(r):
        for j in range(r):
            Ap[i][j] = 2 * triple.A[i][j]
        Ap[i][r + i] = Ap[r + i][i] = Ap[r + i][r + i] = Fraction(1)
    Bp = [2 * b for b in triple.B] + [Fraction(1, 2)] * r
    check_positive_definite(Ap)
    return NahmTriple.make(Ap, Bp, 2 * triple.C + Fraction(r, 24))


@dataclass
class TransformRecord:
    input: NahmTriple
    output: NahmTriple
    kind: str  # "tensor" or "double"
    m: int = 1
    verified_to: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "m": self.m,
            "input": self.input.to_json(),
            "output": self.output.to_json(),
            "verified_to": None if self.verified_to is None else str(self.verified_to),
        }


def tensor(triple: NahmTriple, m: int) -> TransformRecord:
    return TransformRecord(triple, tensor_transform(triple, m), "tensor", m)


def double(triple: NahmTriple) -> TransformRecord:
    return TransformRecord(triple, double_transform(triple), "double", 2)


def verify_transform(record: TransformRecord, order) -> Verdict:
    """Compare both sides of the defining identity exactly below ``order``.

    On success ``record.verified_to`` is set to the order reached.
    """
    order = Fraction(order)
    lhs = nahm_sum(record.output, order)
    if record.kind == "tensor":
        rhs = nahm_sum(record.input, order * record.m).scale_q(Fraction(1, record.m))
    elif record.kind == "double":
        r = record.input.rank
        margin = order + 2
        factor = (eta(2, margin) / eta(1, margin)) ** r
        rhs = (factor * nahm_sum(record.input, order / 2).scale_q(2)).truncate(order)
    else:
        raise ValueError(f"unknown transform kind {record.kind!r}")
    verdict = verify_identity(lhs, rhs)
    if verdict.matched and verdict.match_order != INF:
        record.verified_to = Fraction(verdict.match_order)
    return verdict
