"""Catalog of known modular triples and their eta/theta closed forms.

Each row stores the right-hand side as an expression in the :mod:`expr`
mini-language.  Where the closed form as originally typeset does not match
the Nahm sum, the typeset form is kept in ``literal`` and ``expression`` holds
the corrected one (all eta arguments rescaled, see the rank-one rows with
A = 1/2 and their descendants).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as F

from .system import NahmTriple, format_rational

TABLE_IDS = ("R1", "AFAM", "T1", "T2", "CE4x4")

T2_SAMPLE_A = (F(2, 3), F(3, 4), F(5, 3), F(3))
T2_SAMPLE_B = (F(0), F(1, 3), F(1, 2))

CONJECTURAL = "conjectural-match"
IDENTITY = "identity"


@dataclass
class Row:
    table: str
    triple: NahmTriple
    expression: str
    literal: str | None = None
    status: str = IDENTITY
    flags: list[str] = field(default_factory=list)

    @property
    def label(self) -> str:
        return f"{self.table} {self.triple}"

    def to_json(self) -> dict:
        out = {"table": self.table, "triple": self.triple.to_json(), "expression": self.expression,
               "status": self.status, "flags": list(self.flags)}
        if self.literal is not None:
            out["literal"] = self.literal
        return out


def _q(x: F) -> str:
    return format_rational(F(x))


def _half_eta(j: int, s: str) -> str:
    # theta_{5,j}(s z) eta(2 s z) / (eta(s z) eta(4 s z)) with s = 1/4 or 1/8
    return f"theta5({j},{s})*eta({_q(2 * F(s))})/(eta({s})*eta({_q(4 * F(s))}))"


def _rank_one() -> list[Row]:
    rows = [
        Row("R1", NahmTriple.make(2, 0, F(-1, 60)), "theta5(1,1)/eta(1)"),
        Row("R1", NahmTriple.make(2, 1, F(11, 60)), "theta5(2,1)/eta(1)"),
        Row("R1", NahmTriple.make(1, 0, F(-1, 48)), "eta(1)^2/(eta(1/2)*eta(2))"),
        Row("R1", NahmTriple.make(1, F(1, 2), F(1, 24)), "eta(2)/eta(1)"),
        Row("R1", NahmTriple.make(1, F(-1, 2), F(1, 24)), "2*eta(2)/eta(1)"),
    ]
    for j, B, C in ((1, 0, F(-1, 40)), (2, F(1, 2), F(1, 40))):
        rows.append(Row("R1", NahmTriple.make(F(1, 2), B, C), _half_eta(j, "1/4"),
                        literal=f"theta5({j},1/4)*eta(2)/(eta(1)*eta(4))"))
    return rows


def _a_family() -> list[Row]:
    rows = []
    A1 = [[1, F(-1, 2)], [F(-1, 2), 1]]
    rows.append(Row("AFAM", NahmTriple.make(A1, (0, 0), F(-1, 20)),
                    "(theta5(3/4,2)+theta5(13/4,2))*eta(1)/(eta(2)*eta(1/2))"
                    " + 2*theta5(2,2)*eta(2)/eta(1)^2"))
    for B in ((F(-1, 2), 0), (0, F(-1, 2))):
        rows.append(Row("AFAM", NahmTriple.make(A1, B, F(1, 20)),
                        "2*theta5(1,2)*eta(2)/eta(1)^2"
                        " + theta5(3/2,1)*theta5(2,2)*eta(1)^3/(eta(1/2)^2*eta(2)^2*eta(10))"))
    A34 = [[F(3, 4), F(-1, 4)], [F(-1, 4), F(3, 4)]]
    witness = "counterexample to condition (i): solution ((1+sqrt(-3))/2, (1+sqrt(-3))/2) is not torsion"
    for j, Bs, C in ((1, ((F(1, 4), F(-1, 4)), (F(-1, 4), F(1, 4))), F(-1, 80)),
                     (2, ((F(1, 2), 0), (0, F(1, 2))), F(1, 80))):
        for B in Bs:
            rows.append(Row("AFAM", NahmTriple.make(A34, B, C), _half_eta(j, "1/8"),
                            literal=f"theta5({j},1/8)*eta(1)/(eta(1/2)*eta(2))", flags=[witness]))
    Ahalf = [[F(1, 2), 0], [0, F(1, 2)]]
    one, two = _half_eta(1, "1/4"), _half_eta(2, "1/4")
    lit = "(eta(2)/(eta(1)*eta(4)))"
    rows.append(Row("AFAM", NahmTriple.make(Ahalf, (0, 0), F(-1, 20)), f"({one})^2",
                    literal=f"(theta5(1,1/4)*{lit})^2"))
    for B in ((F(1, 2), 0), (0, F(1, 2))):
        rows.append(Row("AFAM", NahmTriple.make(Ahalf, B, 0), f"({one})*({two})",
                        literal=f"theta5(1,1/4)*theta5(2,1/4)*{lit}^2"))
    rows.append(Row("AFAM", NahmTriple.make(Ahalf, (F(1, 2), F(1, 2)), F(1, 20)), f"({two})^2",
                    literal=f"(theta5(2,1/4)*{lit})^2"))
    return rows


def _table_one() -> list[Row]:
    rows = []
    A43 = [[F(4, 3), F(2, 3)], [F(2, 3), F(4, 3)]]

    def lat(a, b, c):
        return f"(2*altlattice(15/2,{a})+altlattice(15/2,{b})-altlattice(15/2,{c}))/eta(1)"

    rows.append(Row("T1", NahmTriple.make(A43, (0, 0), F(-1, 30)), lat("3/10", "1/30", "11/30"),
                    status=CONJECTURAL))
    for B in ((F(-2, 3), F(-1, 3)), (F(-1, 3), F(-2, 3))):
        rows.append(Row("T1", NahmTriple.make(A43, B, F(1, 30)), lat("1/10", "13/30", "23/30"),
                        status=CONJECTURAL))
    A32 = [[F(3, 2), F(1, 2)], [F(1, 2), F(3, 2)]]
    for B in ((F(1, 4), F(-1, 4)), (F(-1, 4), F(1, 4))):
        rows.append(Row("T1", NahmTriple.make(A32, B, F(-1, 120)), "theta5(1,1/2)/eta(1/2)"))
    for B in ((F(1, 4), F(3, 4)), (F(3, 4), F(1, 4))):
        rows.append(Row("T1", NahmTriple.make(A32, B, F(11, 120)), "theta5(2,1/2)/eta(1/2)"))
    return rows


def table_two_rows(a, b_values=T2_SAMPLE_B) -> list[Row]:
    """Rows for A = ((a, 1-a), (1-a, a)): the (b, -b) family plus the two fixed B."""
    a = F(a)
    A = [[a, 1 - a], [1 - a, a]]
    c = _q(a / 2)
    rows = []
    for b in b_values:
        b = F(b)
        rows.append(Row("T2", NahmTriple.make(A, (b, -b), b * b / (2 * a) - F(1, 24)),
                        f"lattice({c},{_q(b / a)})/eta(1)"))
    rows.append(Row("T2", NahmTriple.make(A, (F(-1, 2), F(-1, 2)), 1 / (8 * a) - F(1, 24)),
                    f"2*lattice({c},{_q(1 / (2 * a))})/eta(1)"))
    for B in ((1 - a / 2, a / 2), (a / 2, 1 - a / 2)):
        rows.append(Row("T2", NahmTriple.make(A, B, a / 8 - F(1, 24)),
                        f"lattice({c},1/2)/(2*eta(1))"))
    return rows


def _table_two() -> list[Row]:
    return [row for a in T2_SAMPLE_A for row in table_two_rows(a)]


def _counterexample() -> list[Row]:
    A = [[3, 1, 1, 0], [1, 3, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
    return [Row("CE4x4", NahmTriple.make(A, (F(1, 2), F(-1, 2), F(1, 2), F(1, 2)), F(1, 15)),
                "eta(2)^2*theta5(1,1)/eta(1)^3",
                flags=["counterexample to condition (i): second-type solutions are not torsion"])]


_BUILDERS = {"R1": _rank_one, "AFAM": _a_family, "T1": _table_one, "T2": _table_two, "CE4x4": _counterexample}


def parse_table_id(name: str) -> str:
    for t in TABLE_IDS:
        if t.lower() == name.strip().lower():
            return t
    raise ValueError(f"unknown table {name!r}; choose from {', '.join(TABLE_IDS)}")


def table_rows(which: str) -> list[Row]:
    return _BUILDERS[parse_table_id(which)]()
