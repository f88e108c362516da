from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sheetguard import CellAddress, EditKind, StructuralEdit
from sheetguard.formula import adjust_references, parse, references, relative_form, to_text


def adjusted_text(text, edit, host="Calc!A1"):
    host_addr = CellAddress("Calc", 1, 1) if host == "Calc!A1" else host
    ast, _ = adjust_references(parse(text), edit, host_addr)
    return to_text(ast)


def insert_rows(at, count=1, sheet="Calc"):
    return StructuralEdit(EditKind.INSERT_ROWS, sheet, at, count)


def delete_rows(at, count=1, sheet="Calc"):
    return StructuralEdit(EditKind.DELETE_ROWS, sheet, at, count)


def insert_cols(at, count=1, sheet="Calc"):
    return StructuralEdit(EditKind.INSERT_COLS, sheet, at, count)


def test_insert_rows_shifts_reference_below():
    assert adjusted_text("=B12", insert_rows(5)) == "=B13"


def test_insert_rows_leaves_reference_above():
    assert adjusted_text("=A1", insert_rows(5)) == "=A1"


def test_delete_rows_shrinks_range():
    assert adjusted_text("=SUM(C3:C6)", delete_rows(4)) == "=SUM(C3:C5)"


def test_insert_rows_grows_range():
    assert adjusted_text("=SUM(B2:B8)", insert_rows(4)) == "=SUM(B2:B9)"


def test_delete_covering_ref_becomes_ref_error():
    assert adjusted_text("=B4+1", delete_rows(4)) == "=#REF!+1"


def test_delete_covering_whole_range_becomes_ref_error():
    assert adjusted_text("=SUM(B4:B5)", delete_rows(4, 2)) == "=SUM(#REF!)"


def test_other_sheet_references_untouched():
    assert adjusted_text("=Other!B12", insert_rows(5)) == "=Other!B12"
    edit = insert_rows(5, sheet="Other")
    assert adjusted_text("=Other!B12", edit) == "=Other!B13"
    assert adjusted_text("=B12", edit) == "=B12"  # host sheet Calc unaffected


def test_insert_cols_shifts_columns_and_host():
    edit = insert_cols(2, 1)
    ast, host = adjust_references(parse("=SUM(B2:D2)"), edit, CellAddress("Calc", 4, 9))
    assert to_text(ast) == "=SUM(C2:E2)"
    assert host == CellAddress("Calc", 5, 9)


def test_absolute_flags_survive_adjustment():
    assert adjusted_text("=Tariffs!$A$2:$D$8", insert_cols(2, 1, sheet="Tariffs")) == "=Tariffs!$A$2:$E$8"


# --- property: references commute with the edit's shift ---

def oracle_shift(col, row, edit):
    """Independent re-derivation of where one cell lands, written as the
    dense-grid argument: the edit moves whole slabs of the grid."""
    index = row if edit.kind.is_rows else col
    if edit.kind.is_insert:
        if index >= edit.at:
            index += edit.count
    else:
        if edit.at <= index < edit.at + edit.count:
            return None
        if index >= edit.at + edit.count:
            index -= edit.count
    return (col, index) if edit.kind.is_rows else (index, row)


_edits = st.builds(
    StructuralEdit,
    kind=st.sampled_from(list(EditKind)),
    sheet=st.just("Calc"),
    at=st.integers(1, 12),
    count=st.integers(0, 3),
)


@st.composite
def _formulas(draw):
    refs = draw(st.lists(
        st.tuples(st.integers(1, 10), st.integers(1, 10)), min_size=1, max_size=5
    ))
    parts = [f"{chr(64 + c)}{r}" for c, r in refs]
    return "=" + "+".join(parts)


@given(_formulas(), _edits)
@settings(max_examples=300)
def test_adjusted_references_match_shifted_references(text, edit):
    host = CellAddress("Calc", 20, 20)
    before = references(parse(text), "Calc")
    ast, _ = adjust_references(parse(text), edit, host)
    after = references(ast, "Calc")

    expected = Counter()
    dropped = 0
    for addr, n in before.items():
        shifted = oracle_shift(addr.col, addr.row, edit)
        if shifted is None:
            dropped += 1
            continue
        expected[CellAddress("Calc", shifted[0], shifted[1])] += n
    assert {a: n for a, n in after.items()} == {a: n for a, n in expected.items()}
    ref_error_count = to_text(ast).count("#REF!")
    assert (dropped > 0) == (ref_error_count > 0)


def test_relative_form_matches_fill_pattern():
    host_a = CellAddress("Calc", 11, 30)
    host_b = CellAddress("Calc", 11, 31)
    a = relative_form(parse("=I30+J30"), host_a)
    b = relative_form(parse("=I31+J31"), host_b)
    assert a == b
    off = relative_form(parse("=I31+J29"), host_b)
    assert off != a


def test_relative_form_keeps_absolute_axes():
    host_a = CellAddress("Calc", 8, 28)
    host_b = CellAddress("Calc", 8, 29)
    a = relative_form(parse("=VLOOKUP(G28,Tariffs!$A$2:$D$8,H$25,FALSE)"), host_a)
    b = relative_form(parse("=VLOOKUP(G29,Tariffs!$A$2:$D$8,H$25,FALSE)"), host_b)
    assert a == b


def test_insert_pushing_ref_off_grid_becomes_ref_error():
    from sheetguard.addressing import MAX_ROWS

    text = f"=B{MAX_ROWS}"
    assert adjusted_text(text, insert_rows(1)) == "=#REF!"
    ranged = f"=SUM(B{MAX_ROWS - 1}:B{MAX_ROWS})"
    assert adjusted_text(ranged, insert_rows(1)) == f"=SUM(B{MAX_ROWS}:B{MAX_ROWS})"
