"""Published values, transcribed by hand for use as test oracles.

Triples are (A, B, C) with A a list of rows (or a scalar for rank one).
"""

from fractions import Fraction as F

RANK_ONE = [
    (2, 0, F(-1, 60)),
    (2, 1, F(11, 60)),
    (1, 0, F(-1, 48)),
    (1, F(1, 2), F(1, 24)),
    (1, F(-1, 2), F(1, 24)),
    (F(1, 2), 0, F(-1, 40)),
    (F(1, 2), F(1, 2), F(1, 40)),
]

A_ONE = [[1, F(-1, 2)], [F(-1, 2), 1]]
A_THREE_QUARTERS = [[F(3, 4), F(-1, 4)], [F(-1, 4), F(3, 4)]]
A_HALF = [[F(1, 2), 0], [0, F(1, 2)]]

A_FAMILY = [
    (A_ONE, (0, 0), F(-1, 20)),
    (A_ONE, (F(-1, 2), 0), F(1, 20)),
    (A_ONE, (0, F(-1, 2)), F(1, 20)),
    (A_THREE_QUARTERS, (F(1, 4), F(-1, 4)), F(-1, 80)),
    (A_THREE_QUARTERS, (F(-1, 4), F(1, 4)), F(-1, 80)),
    (A_THREE_QUARTERS, (F(1, 2), 0), F(1, 80)),
    (A_THREE_QUARTERS, (0, F(1, 2)), F(1, 80)),
    (A_HALF, (0, 0), F(-1, 20)),
    (A_HALF, (F(1, 2), 0), 0),
    (A_HALF, (0, F(1, 2)), 0),
    (A_HALF, (F(1, 2), F(1, 2)), F(1, 20)),
]

A_FOUR_THIRDS = [[F(4, 3), F(2, 3)], [F(2, 3), F(4, 3)]]
A_THREE_HALVES = [[F(3, 2), F(1, 2)], [F(1, 2), F(3, 2)]]

TABLE_ONE = [
    (A_FOUR_THIRDS, (0, 0), F(-1, 30)),
    (A_FOUR_THIRDS, (F(-2, 3), F(-1, 3)), F(1, 30)),
    (A_FOUR_THIRDS, (F(-1, 3), F(-2, 3)), F(1, 30)),
    (A_THREE_HALVES, (F(1, 4), F(-1, 4)), F(-1, 120)),
    (A_THREE_HALVES, (F(-1, 4), F(1, 4)), F(-1, 120)),
    (A_THREE_HALVES, (F(1, 4), F(3, 4)), F(11, 120)),
    (A_THREE_HALVES, (F(3, 4), F(1, 4)), F(11, 120)),
]


def table_two(a, b):
    """The (b, -b) row and, once per a, the fixed-B rows of the (a, 1-a) family."""
    a, b = F(a), F(b)
    A = [[a, 1 - a], [1 - a, a]]
    return A, (b, -b), b * b / (2 * a) - F(1, 24)


def table_two_fixed(a):
    a = F(a)
    A = [[a, 1 - a], [1 - a, a]]
    return [
        (A, (F(-1, 2), F(-1, 2)), 1 / (8 * a) - F(1, 24)),
        (A, (1 - a / 2, a / 2), a / 8 - F(1, 24)),
        (A, (a / 2, 1 - a / 2), a / 8 - F(1, 24)),
    ]


TABLE_TWO_A = (F(2, 3), F(3, 4), F(5, 3), F(3))
TABLE_TWO_B = (F(0), F(1, 3), F(1, 2))

INTEGER_4X4 = (
    [[3, 1, 1, 0], [1, 3, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1]],
    (F(1, 2), F(-1, 2), F(1, 2), F(1, 2)),
    F(1, 15),
)

# D((1 + sqrt(-3)) / 2), printed to five decimals
D_PRIMITIVE_SIXTH_ROOT = 1.01494
