"""In-memory spreadsheet document.

Sparse cell storage, A1 addressing, structural row/column edits that
relocate stable names and rewrite formulas, and immutable snapshots for
the analysis side.  A workbook is single-writer: all mutation goes
through one owner (see :mod:`sheetguard.session`), while snapshots may
be shared freely with concurrent readers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterator, Union

from .addressing import (
    MAX_COLS,
    MAX_ROWS,
    CellAddress,
    RangeAddress,
    check_bounds,
)
from .edits import StructuralEdit, shift_index, shift_span
from .errors import BadName, OutOfRange, UnknownName, UnknownSheet
from .formula import Node, parse, to_text
from .formula.refs import rewrite_for_edit
from .guardian import GuardianSpec
from .values import CellValue, canonical_scalar

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class CellFormat:
    font_color: str | None = None
    fill_color: str | None = None

    @property
    def is_plain(self) -> bool:
        return self.font_color is None and self.fill_color is None


PLAIN = CellFormat()


@dataclass(frozen=True)
class CellContent:
    """One cell: empty, a literal value, or a formula (plus format)."""

    value: CellValue | None = None
    ast: Node | None = None
    source: str | None = None
    format: CellFormat = PLAIN

    @staticmethod
    def empty(fmt: CellFormat = PLAIN) -> "CellContent":
        return CellContent(format=fmt)

    @staticmethod
    def of_value(scalar: CellValue, fmt: CellFormat = PLAIN) -> "CellContent":
        if not isinstance(scalar, (int, float, str, bool)):
            raise TypeError(f"cell values are numbers, text or booleans, got {scalar!r}")
        return CellContent(value=canonical_scalar(scalar), format=fmt)

    @staticmethod
    def of_formula(text_or_ast: Union[str, Node], fmt: CellFormat = PLAIN) -> "CellContent":
        ast = parse(text_or_ast) if isinstance(text_or_ast, str) else text_or_ast
        return CellContent(ast=ast, source=to_text(ast), format=fmt)

    @property
    def is_formula(self) -> bool:
        return self.ast is not None

    @property
    def is_value(self) -> bool:
        return self.value is not None

    @property
    def is_empty(self) -> bool:
        return self.value is None and self.ast is None


EMPTY_CELL = CellContent()


class Dangling:
    """Marker target for a stable name whose cell was deleted."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DANGLING"


DANGLING = Dangling()

NameTarget = Union[CellAddress, RangeAddress, Dangling]


@dataclass(frozen=True)
class EditReceipt:
    """Returned by every mutating operation; ``changed`` is the dirty set
    handed to the recalculation side."""

    generation: int
    changed: tuple[CellAddress, ...] = ()
    structural: bool = False


class Worksheet:
    def __init__(self, name: str):
        self.name = name
        self.cells: dict[tuple[int, int], CellContent] = {}

    def used_extent(self) -> tuple[int, int]:
        """(max col, max row) over occupied cells; (0, 0) when empty."""
        if not self.cells:
            return 0, 0
        return max(c for c, _ in self.cells), max(r for _, r in self.cells)


class Workbook:
    def __init__(self, sheet_names: tuple[str, ...] | list[str] = ("Sheet1",)):
        self._sheets: dict[str, Worksheet] = {}
        for name in sheet_names:
            self.add_sheet(name)
        self.names: dict[str, NameTarget] = {}
        self.guardian = GuardianSpec()
        self.generation = 0

    # --- sheets ---

    def add_sheet(self, name: str) -> Worksheet:
        if not name:
            raise UnknownSheet(name)
        if name in self._sheets:
            raise ValueError(f"sheet already exists: {name!r}")
        ws = Worksheet(name)
        self._sheets[name] = ws
        return ws

    @property
    def sheet_names(self) -> tuple[str, ...]:
        return tuple(self._sheets)

    def sheet(self, name: str) -> Worksheet:
        try:
            return self._sheets[name]
        except KeyError:
            raise UnknownSheet(name) from None

    def has_sheet(self, name: str) -> bool:
        return name in self._sheets

    # --- cells ---

    def cell(self, addr: CellAddress) -> CellContent:
        ws = self.sheet(addr.sheet)
        return ws.cells.get((addr.col, addr.row), EMPTY_CELL)

    def set_cell(self, addr: CellAddress, content: CellContent) -> EditReceipt:
        ws = self.sheet(addr.sheet)
        check_bounds(addr.col, addr.row)
        if content.is_empty and content.format.is_plain:
            ws.cells.pop((addr.col, addr.row), None)
        else:
            ws.cells[(addr.col, addr.row)] = content
        self.generation += 1
        return EditReceipt(self.generation, changed=(addr,))

    def iter_cells(self) -> Iterator[tuple[CellAddress, CellContent]]:
        for ws in self._sheets.values():
            for (col, row), content in ws.cells.items():
                yield CellAddress(ws.name, col, row), content

    # --- structural edits ---

    def apply_structural_edit(self, edit: StructuralEdit) -> EditReceipt:
        ws = self.sheet(edit.sheet)
        if not edit.kind.is_insert:
            used_col, used_row = ws.used_extent()
            used = used_row if edit.kind.is_rows else used_col
            if edit.count and edit.at + edit.count - 1 > used:
                raise OutOfRange(
                    f"cannot delete past the used extent ({edit.at}+{edit.count - 1} > {used})"
                )
        new_sheets = self._shifted_sheets(edit)
        new_names = self._shifted_names(edit)
        self._sheets = new_sheets
        self.names = new_names
        self.generation += 1
        return EditReceipt(self.generation, structural=True)

    def _shifted_sheets(self, edit: StructuralEdit) -> dict[str, Worksheet]:
        out: dict[str, Worksheet] = {}
        for ws in self._sheets.values():
            new_ws = Worksheet(ws.name)
            for (col, row), content in ws.cells.items():
                if ws.name == edit.sheet:
                    moving = row if edit.kind.is_rows else col
                    shifted = shift_index(moving, edit)
                    if shifted is None:
                        continue  # cell sat in the deleted span
                    if edit.kind.is_rows:
                        row = shifted
                    else:
                        col = shifted
                    if col > MAX_COLS or row > MAX_ROWS:
                        raise OutOfRange(f"edit pushes {ws.name}!({col},{row}) off the grid")
                if content.is_formula:
                    new_ast = rewrite_for_edit(content.ast, edit, ws.name)
                    if new_ast is not content.ast:
                        content = replace(content, ast=new_ast, source=to_text(new_ast))
                new_ws.cells[(col, row)] = content
            out[ws.name] = new_ws
        return out

    def _shifted_names(self, edit: StructuralEdit) -> dict[str, NameTarget]:
        out: dict[str, NameTarget] = {}
        for name, target in self.names.items():
            out[name] = _shift_target(target, edit)
        return out

    # --- stable names ---

    def bind_name(self, name: str, target: CellAddress | RangeAddress):
        if not _NAME_RE.match(name):
            raise BadName(f"invalid name: {name!r}")
        if isinstance(target, CellAddress):
            self.sheet(target.sheet)
            check_bounds(target.col, target.row)
        elif isinstance(target, RangeAddress):
            self.sheet(target.sheet)
            check_bounds(target.end_col, target.end_row)
        else:
            raise TypeError(f"cannot bind {target!r}")
        self.names[name] = target

    def resolve_name(self, name: str) -> NameTarget:
        try:
            return self.names[name]
        except KeyError:
            raise UnknownName(name) from None

    # --- snapshots & comparison ---

    def snapshot(self) -> "FrozenWorkbook":
        return FrozenWorkbook(self)

    def content_equals(self, other: "Workbook") -> bool:
        """Value equality over everything the file format persists
        (generation excluded)."""
        if self.sheet_names != other.sheet_names:
            return False
        for name in self.sheet_names:
            if self.sheet(name).cells != other.sheet(name).cells:
                return False
        if self.names != other.names:
            return False
        g, og = self.guardian, other.guardian
        return (
            g.roles == og.roles
            and g.scenarios == og.scenarios
            and g.validation_rules == og.validation_rules
            and g.flags == og.flags
            and g.extra == og.extra
        )


def _shift_target(target: NameTarget, edit: StructuralEdit) -> NameTarget:
    if isinstance(target, CellAddress):
        if target.sheet != edit.sheet:
            return target
        if edit.kind.is_rows:
            row = shift_index(target.row, edit)
            if row is None:
                return DANGLING
            return CellAddress(target.sheet, target.col, row)
        col = shift_index(target.col, edit)
        if col is None:
            return DANGLING
        return CellAddress(target.sheet, col, target.row)
    if isinstance(target, RangeAddress):
        if target.sheet != edit.sheet:
            return target
        if edit.kind.is_rows:
            span = shift_span(target.start_row, target.end_row, edit)
            if span is None:
                return DANGLING
            return RangeAddress(target.sheet, target.start_col, span[0], target.end_col, span[1])
        span = shift_span(target.start_col, target.end_col, edit)
        if span is None:
            return DANGLING
        return RangeAddress(target.sheet, span[0], target.start_row, span[1], target.end_row)
    return target  # already dangling


class FrozenWorkbook:
    """Deep, immutable copy of a workbook at one generation.

    Cell contents and guardian entries are immutable objects, so the
    copy shares them; only the containers are duplicated.  Safe to hand
    to analysis workers while the source keeps mutating.
    """

    def __init__(self, wb: Workbook):
        self._cells: dict[str, dict[tuple[int, int], CellContent]] = {
            name: dict(wb.sheet(name).cells) for name in wb.sheet_names
        }
        self.sheet_names: tuple[str, ...] = wb.sheet_names
        self.names: dict[str, NameTarget] = dict(wb.names)
        self.guardian: GuardianSpec = wb.guardian.copy()
        self.generation: int = wb.generation

    def has_sheet(self, name: str) -> bool:
        return name in self._cells

    def sheet_cells(self, name: str) -> dict[tuple[int, int], CellContent]:
        try:
            return self._cells[name]
        except KeyError:
            raise UnknownSheet(name) from None

    def cell(self, addr: CellAddress) -> CellContent:
        return self.sheet_cells(addr.sheet).get((addr.col, addr.row), EMPTY_CELL)

    def used_extent(self, sheet: str) -> tuple[int, int]:
        cells = self.sheet_cells(sheet)
        if not cells:
            return 0, 0
        return max(c for c, _ in cells), max(r for _, r in cells)

    def iter_cells(self) -> Iterator[tuple[CellAddress, CellContent]]:
        for name in self.sheet_names:
            for (col, row), content in self._cells[name].items():
                yield CellAddress(name, col, row), content

    def formula_cells(self) -> Iterator[tuple[CellAddress, CellContent]]:
        for addr, content in self.iter_cells():
            if content.is_formula:
                yield addr, content

    def resolve_name(self, name: str) -> NameTarget:
        try:
            return self.names[name]
        except KeyError:
            raise UnknownName(name) from None

    def cell_count(self) -> int:
        return sum(len(cells) for cells in self._cells.values())

    def equals(self, other: "FrozenWorkbook") -> bool:
        return (
            self.sheet_names == other.sheet_names
            and self._cells == other._cells
            and self.names == other.names
            and self.generation == other.generation
        )
