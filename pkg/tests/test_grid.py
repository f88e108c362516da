import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sheetguard import (
    DANGLING,
    CellContent,
    CellFormat,
    EditKind,
    StructuralEdit,
    Workbook,
    parse_address,
    parse_range,
)
from sheetguard.errors import BadName, OutOfRange, UnknownName, UnknownSheet
from conftest import build_workbook


def A(text):
    return parse_address(text)


def test_set_cell_bumps_generation():
    wb = Workbook(["Calc"])
    before = wb.generation
    receipt = wb.set_cell(A("Calc!B2"), CellContent.of_value(12))
    assert receipt.generation == before + 1
    assert receipt.changed == (A("Calc!B2"),)
    assert wb.cell(A("Calc!B2")).value == 12.0


def test_set_formula_round_trips():
    wb = Workbook(["Calc"])
    wb.set_cell(A("Calc!C1"), CellContent.of_formula("=B2+B3"))
    cell = wb.cell(A("Calc!C1"))
    assert cell.is_formula
    assert cell.source == "=B2+B3"
    from sheetguard.formula import references

    assert sum(references(cell.ast, "Calc").values()) == 2


def test_set_cell_unknown_sheet():
    wb = Workbook(["Calc"])
    with pytest.raises(UnknownSheet):
        wb.set_cell(A("Nope!A1"), CellContent.of_value(1))


def test_generation_strictly_increases():
    wb = build_workbook({"Calc": {"B2": 1}})
    gens = [wb.generation]
    wb.set_cell(A("Calc!B3"), CellContent.of_value(2))
    gens.append(wb.generation)
    wb.apply_structural_edit(StructuralEdit(EditKind.INSERT_ROWS, "Calc", 1, 1))
    gens.append(wb.generation)
    assert gens == sorted(set(gens))


def test_insert_rows_relocates_name():
    wb = build_workbook({"Calc": {"B12": "=A1+0"}})
    wb.bind_name("sg_out_1", A("Calc!B12"))
    wb.apply_structural_edit(StructuralEdit(EditKind.INSERT_ROWS, "Calc", 5, 1))
    assert wb.resolve_name("sg_out_1") == A("Calc!B13")
    assert wb.cell(A("Calc!B13")).is_formula
    assert wb.cell(A("Calc!B12")).is_empty


def test_insert_zero_count_only_bumps_generation():
    wb = build_workbook({"Calc": {"B2": 5, "C1": "=B2"}})
    wb.bind_name("n", A("Calc!B2"))
    before_cells = dict(wb.sheet("Calc").cells)
    gen = wb.generation
    wb.apply_structural_edit(StructuralEdit(EditKind.INSERT_COLS, "Calc", 1, 0))
    assert wb.generation == gen + 1
    assert wb.sheet("Calc").cells == before_cells
    assert wb.resolve_name("n") == A("Calc!B2")


def test_insert_rows_rewrites_formula_and_moves_content():
    wb = build_workbook({"Calc": {
        "B2": 1, "B3": 2, "B4": 3, "B5": 4, "B6": 5, "B7": 6, "B8": 7,
        "B9": "=SUM(B2:B8)",
    }})
    wb.apply_structural_edit(StructuralEdit(EditKind.INSERT_ROWS, "Calc", 4, 1))
    moved = wb.cell(A("Calc!B10"))
    assert moved.is_formula
    assert moved.source == "=SUM(B2:B9)"
    assert wb.cell(A("Calc!B9")).value == 7.0   # former B8 shifted down
    assert wb.cell(A("Calc!B4")).is_empty       # the inserted row is blank


def test_delete_rows_dangles_name_and_refs():
    wb = build_workbook({"Calc": {"B4": 9, "C1": "=B4+B5", "B5": 1}})
    wb.bind_name("victim", A("Calc!B4"))
    wb.apply_structural_edit(StructuralEdit(EditKind.DELETE_ROWS, "Calc", 4, 1))
    assert wb.resolve_name("victim") is DANGLING
    assert wb.cell(A("Calc!C1")).source == "=#REF!+B4"


def test_delete_beyond_used_extent_rejected():
    wb = build_workbook({"Calc": {"B4": 9}})
    with pytest.raises(OutOfRange):
        wb.apply_structural_edit(StructuralEdit(EditKind.DELETE_ROWS, "Calc", 4, 5))


def test_cross_sheet_formulas_adjust():
    wb = build_workbook({
        "Tariffs": {"A2": "x", "B2": 1},
        "Calc": {"C1": "=Tariffs!B2"},
    })
    wb.apply_structural_edit(StructuralEdit(EditKind.INSERT_COLS, "Tariffs", 2, 1))
    assert wb.cell(A("Calc!C1")).source == "=Tariffs!C2"


def test_bind_and_resolve_name():
    wb = Workbook(["Calc"])
    wb.bind_name("sg_in_3", A("Calc!D7"))
    assert wb.resolve_name("sg_in_3") == A("Calc!D7")
    wb.bind_name("sg_in_3", A("Calc!D8"))  # re-binding overwrites
    assert wb.resolve_name("sg_in_3") == A("Calc!D8")


def test_resolve_unknown_name():
    wb = Workbook(["Calc"])
    with pytest.raises(UnknownName):
        wb.resolve_name("ghost")


def test_bad_name_pattern_rejected():
    wb = Workbook(["Calc"])
    with pytest.raises(BadName):
        wb.bind_name("1bad", A("Calc!A1"))
    with pytest.raises(BadName):
        wb.bind_name("sg out", A("Calc!A1"))


def test_range_name_binding():
    wb = Workbook(["Calc"])
    wb.bind_name("table", parse_range("Calc!A2:D8"))
    assert wb.resolve_name("table") == parse_range("Calc!A2:D8")
    wb.apply_structural_edit(StructuralEdit(EditKind.INSERT_COLS, "Calc", 2, 1))
    assert wb.resolve_name("table") == parse_range("Calc!A2:E8")


def test_snapshot_isolated_from_edits():
    wb = build_workbook({"Calc": {"B2": 1}})
    snap = wb.snapshot()
    wb.set_cell(A("Calc!B2"), CellContent.of_value(99))
    assert snap.cell(A("Calc!B2")).value == 1.0
    assert wb.cell(A("Calc!B2")).value == 99.0


def test_snapshot_of_empty_workbook():
    wb = Workbook(["Calc", "Data"])
    snap = wb.snapshot()
    assert snap.sheet_names == ("Calc", "Data")
    assert snap.cell_count() == 0


def test_snapshots_without_edits_are_equal():
    wb = build_workbook({"Calc": {"B2": 1, "C1": "=B2"}})
    wb.bind_name("n", A("Calc!B2"))
    s1 = wb.snapshot()
    s2 = wb.snapshot()
    assert s1.equals(s2)
    assert s1.generation == s2.generation


def test_snapshot_guardian_isolated():
    wb = Workbook(["Calc"])
    snap = wb.snapshot()
    wb.guardian.roles["sg_in_1"] = None
    assert "sg_in_1" not in snap.guardian.roles


def test_formatted_empty_cell_persists():
    wb = Workbook(["Calc"])
    fmt = CellFormat(font_color="#FFFFFF", fill_color="#FFFFFF")
    wb.set_cell(A("Calc!H25"), CellContent.empty(fmt))
    assert wb.cell(A("Calc!H25")).format == fmt
    wb.set_cell(A("Calc!H25"), CellContent.empty())
    assert (8, 25) not in wb.sheet("Calc").cells


def test_column_limit_enforced():
    wb = Workbook(["Calc"])
    with pytest.raises(OutOfRange):
        wb.set_cell(parse_address("Calc!XFE1"), CellContent.of_value(1))


# --- properties ---

_coords = st.tuples(st.integers(1, 8), st.integers(1, 8))


@st.composite
def small_workbooks(draw):
    cells = draw(st.dictionaries(_coords, st.integers(-99, 99), min_size=1, max_size=8))
    wb = Workbook(["Calc"])
    for (col, row), value in cells.items():
        wb.set_cell(parse_address(f"Calc!{chr(64 + col)}{row}"), CellContent.of_value(value))
    # one formula summing two random cells keeps the rewrite path busy
    (c1, r1), (c2, r2) = draw(st.sampled_from(list(cells))), draw(st.sampled_from(list(cells)))
    wb.set_cell(
        parse_address("Calc!J10"),
        CellContent.of_formula(f"={chr(64 + c1)}{r1}+{chr(64 + c2)}{r2}"),
    )
    return wb


_row_edits = st.builds(
    StructuralEdit,
    kind=st.sampled_from([EditKind.INSERT_ROWS, EditKind.INSERT_COLS]),
    sheet=st.just("Calc"),
    at=st.integers(1, 9),
    count=st.integers(1, 3),
)


@given(small_workbooks(), _row_edits)
@settings(max_examples=120)
def test_insert_then_delete_restores_contents_and_names(wb, edit):
    for name, (col, row) in (("first", (1, 1)), ("mid", (4, 4))):
        wb.bind_name(name, parse_address(f"Calc!{chr(64 + col)}{row}"))
    cells_before = dict(wb.sheet("Calc").cells)
    names_before = dict(wb.names)

    wb.apply_structural_edit(edit)
    inverse_kind = EditKind.DELETE_ROWS if edit.kind == EditKind.INSERT_ROWS else EditKind.DELETE_COLS
    wb.apply_structural_edit(StructuralEdit(inverse_kind, "Calc", edit.at, edit.count))

    assert dict(wb.sheet("Calc").cells) == cells_before
    assert dict(wb.names) == names_before


@given(small_workbooks(), _row_edits)
@settings(max_examples=120)
def test_name_relocation_tracks_content(wb, edit):
    # Whatever content sat under the name before the edit sits under the
    # relocated name afterwards.
    target = parse_address("Calc!D4")
    wb.set_cell(target, CellContent.of_value(424242))
    wb.bind_name("tracked", target)
    wb.apply_structural_edit(edit)
    relocated = wb.resolve_name("tracked")
    assert relocated is not DANGLING
    assert wb.cell(relocated).value == 424242.0


def test_non_finite_values_rejected():
    wb = Workbook(["Calc"])
    with pytest.raises(ValueError):
        wb.set_cell(A("Calc!A1"), CellContent.of_value(float("nan")))
    with pytest.raises(ValueError):
        wb.set_cell(A("Calc!A1"), CellContent.of_value(float("inf")))
