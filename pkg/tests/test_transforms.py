import json
from fractions import Fraction as F

import pytest

from nahmsums import NahmTriple, NotPositiveDefinite, nahm_sum, verify_identity
from nahmsums.qseries import eta
from nahmsums.transforms import (
    double,
    double_transform,
    l_vector,
    tensor,
    tensor_transform,
    verify_transform,
)


def test_l_vector():
    assert l_vector(1) == (0,)
    assert l_vector(2) == (F(-1, 4), F(1, 4))
    assert l_vector(3) == (F(-1, 3), 0, F(1, 3))
    assert sum(l_vector(7)) == 0
    with pytest.raises(ValueError):
        l_vector(0)


def test_tensor_of_rank_one_by_hand():
    t = tensor_transform(NahmTriple.make(2, 0, F(-1, 60)), 2)
    assert t.A == ((F(3, 2), F(1, 2)), (F(1, 2), F(3, 2)))
    assert t.B == (F(-1, 4), F(1, 4))
    assert t.C == F(-1, 120)


def test_tensor_of_rank_two_with_asymmetric_B():
    src = NahmTriple.make([[2, 1], [1, 1]], (0, F(1, 2)), F(1, 7))
    rec = tensor(src, 3)
    assert rec.output.rank == 6
    # A' = I + E_3 (x) (A - I) in block layout
    assert rec.output.A[0][2] == F(1, 3) and rec.output.A[1][1] == 1 and rec.output.A[0][0] == F(4, 3)
    lhs = nahm_sum(rec.output, 4)
    rhs = nahm_sum(src, 12).scale_q(F(1, 3))
    assert verify_identity(lhs, rhs)
    assert verify_transform(rec, 4)
    assert rec.verified_to == 4


@pytest.mark.parametrize("A, B, C", [(1, F(1, 2), F(1, 24)), (2, 0, F(-1, 60)), (2, 1, F(11, 60))])
def test_doubling_identity(A, B, C):
    src = NahmTriple.make(A, B, C)
    rec = double(src)
    assert rec.output.A == ((2 * F(A), 1), (1, 1))
    assert rec.output.C == 2 * F(C) + F(1, 24)
    order = 16
    factor = eta(2, order + 2) / eta(1, order + 2)
    rhs = (factor * nahm_sum(src, order / 2).scale_q(2)).truncate(order)
    assert verify_identity(nahm_sum(rec.output, order), rhs)
    assert verify_transform(rec, order)


def test_doubling_needs_positive_definite_output():
    with pytest.raises(NotPositiveDefinite):
        double_transform(NahmTriple.make(F(1, 2), 0, F(-1, 40)))


def test_record_json():
    rec = tensor(NahmTriple.make(1, 0, F(-1, 48)), 2)
    js = json.loads(json.dumps(rec.to_json()))
    assert js["kind"] == "tensor" and js["m"] == 2 and js["verified_to"] is None
    assert NahmTriple.from_json(js["output"]) == rec.output
    verify_transform(rec, 6)
    assert rec.to_json()["verified_to"] == "6"
    with pytest.raises(ValueError):
        tensor_transform(rec.input, 0)
