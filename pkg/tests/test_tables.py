from fractions import Fraction as F

import pytest

import published
from nahmsums import nahm_sum, verify_identity
from nahmsums.expr import evaluate
from nahmsums.tables import CONJECTURAL, TABLE_IDS, parse_table_id, table_rows, table_two_rows

ORDER = 24


def test_table_ids_are_case_insensitive():
    assert parse_table_id("r1") == "R1"
    assert parse_table_id(" ce4X4 ") == "CE4x4"
    with pytest.raises(ValueError):
        parse_table_id("T3")
    assert set(TABLE_IDS) == {"R1", "AFAM", "T1", "T2", "CE4x4"}


def test_row_counts():
    assert len(table_rows("R1")) == len(published.RANK_ONE) == 7
    assert len(table_rows("AFAM")) == len(published.A_FAMILY) == 11
    assert len(table_rows("T1")) == len(published.TABLE_ONE) == 7
    assert len(table_rows("T2")) == 4 * 6
    assert len(table_rows("CE4x4")) == 1


def test_rank_one_triples_match_transcription():
    got = {(r.triple.A[0][0], r.triple.B[0], r.triple.C) for r in table_rows("R1")}
    assert got == {(F(A), F(B), F(C)) for A, B, C in published.RANK_ONE}


@pytest.mark.parametrize("row", [r for t in ("R1", "AFAM") for r in table_rows(t) if r.literal], ids=lambda r: r.label)
def test_literal_forms_fail_and_corrected_forms_hold(row):
    lhs = nahm_sum(row.triple, ORDER)
    assert verify_identity(lhs, evaluate(row.expression, ORDER))
    assert not verify_identity(lhs, evaluate(row.literal, ORDER))


def test_flags_and_status():
    flagged = [r for r in table_rows("AFAM") if r.flags]
    assert len(flagged) == 4
    assert all(r.triple.A[0][0] == F(3, 4) for r in flagged)
    assert all(r.status == CONJECTURAL for r in table_rows("T1")[:3])
    assert table_rows("CE4x4")[0].flags


def test_table_two_rows_for_other_parameters():
    # the family holds for every a > 1/2, not only the sampled ones
    for row in table_two_rows(F(7, 5), (F(1, 5),)):
        assert verify_identity(nahm_sum(row.triple, ORDER), evaluate(row.expression, ORDER))


def test_row_json_keeps_literal():
    row = next(r for r in table_rows("R1") if r.literal)
    js = row.to_json()
    assert js["literal"] == row.literal and js["table"] == "R1"
    assert "literal" not in table_rows("R1")[0].to_json()
