"""Reference extraction, structural-edit rewriting and relative forms."""

from __future__ import annotations

from collections import Counter

from ..addressing import MAX_COLS, MAX_ROWS, CellAddress
from ..edits import StructuralEdit, shift_index, shift_span
from ..errors import OutOfRange
from ..values import ErrorKind
from .ast import (
    Binary,
    Call,
    CellRef,
    ErrorLit,
    Node,
    RangeRef,
    Unary,
)


def references(node: Node, host_sheet: str) -> Counter:
    """Multiset of cell addresses a formula reads, ranges expanded.

    Unqualified references resolve against the host cell's sheet.
    Repetition counts are preserved: ``=B4+B4`` yields B4 twice.
    """
    refs: Counter = Counter()
    _collect(node, host_sheet, refs)
    return refs


def _collect(node: Node, host_sheet: str, refs: Counter):
    if isinstance(node, CellRef):
        refs[CellAddress(node.sheet or host_sheet, node.col, node.row)] += 1
    elif isinstance(node, RangeRef):
        sheet = node.start.sheet or host_sheet
        for row in range(node.start.row, node.end.row + 1):
            for col in range(node.start.col, node.end.col + 1):
                refs[CellAddress(sheet, col, row)] += 1
    elif isinstance(node, Unary):
        _collect(node.operand, host_sheet, refs)
    elif isinstance(node, Binary):
        _collect(node.lhs, host_sheet, refs)
        _collect(node.rhs, host_sheet, refs)
    elif isinstance(node, Call):
        for arg in node.args:
            _collect(arg, host_sheet, refs)


def ranges_in(node: Node, host_sheet: str):
    """Yield (sheet, start_col, start_row, end_col, end_row) per RangeRef."""
    if isinstance(node, RangeRef):
        sheet = node.start.sheet or host_sheet
        yield (sheet, node.start.col, node.start.row, node.end.col, node.end.row)
    elif isinstance(node, Unary):
        yield from ranges_in(node.operand, host_sheet)
    elif isinstance(node, Binary):
        yield from ranges_in(node.lhs, host_sheet)
        yield from ranges_in(node.rhs, host_sheet)
    elif isinstance(node, Call):
        for arg in node.args:
            yield from ranges_in(arg, host_sheet)


def direct_refs(node: Node, host_sheet: str):
    """Yield addresses of plain (non-range) references only."""
    if isinstance(node, CellRef):
        yield CellAddress(node.sheet or host_sheet, node.col, node.row)
    elif isinstance(node, Unary):
        yield from direct_refs(node.operand, host_sheet)
    elif isinstance(node, Binary):
        yield from direct_refs(node.lhs, host_sheet)
        yield from direct_refs(node.rhs, host_sheet)
    elif isinstance(node, Call):
        for arg in node.args:
            yield from direct_refs(arg, host_sheet)


_REF_GONE = ErrorLit(ErrorKind.REF)


def adjust_references(node: Node, edit: StructuralEdit, host: CellAddress) -> tuple[Node, CellAddress]:
    """Rewrite a formula for a structural edit; relocate its host address.

    References at or after the edit point shift by the edit count;
    references strictly inside a deleted span become ``#REF!`` nodes.
    """
    new_ast = rewrite_for_edit(node, edit, host.sheet)
    new_host = shift_address(host, edit)
    if new_host is None:
        # The host itself sat in the deleted span; the caller drops the
        # cell, but return something well-formed for uniformity.
        new_host = CellAddress(host.sheet, host.col if edit.kind.is_rows else edit.at, edit.at if edit.kind.is_rows else host.row)
    return new_ast, new_host


def shift_address(addr: CellAddress, edit: StructuralEdit) -> CellAddress | None:
    if addr.sheet != edit.sheet:
        return addr
    if edit.kind.is_rows:
        row = shift_index(addr.row, edit)
        if row is None:
            return None
        if row > MAX_ROWS:
            raise OutOfRange(f"edit pushes {addr} past the last row")
        return CellAddress(addr.sheet, addr.col, row)
    col = shift_index(addr.col, edit)
    if col is None:
        return None
    if col > MAX_COLS:
        raise OutOfRange(f"edit pushes {addr} past the last column")
    return CellAddress(addr.sheet, col, addr.row)


def _on_edited_sheet(ref_sheet: str | None, host_sheet: str, edit: StructuralEdit) -> bool:
    return (ref_sheet or host_sheet) == edit.sheet


def rewrite_for_edit(node: Node, edit: StructuralEdit, host_sheet: str) -> Node:
    """Shift every reference of ``node`` for the edit, without touching
    the host address (the grid relocates cells itself)."""
    return _adjust(node, edit, host_sheet)


def _adjust(node: Node, edit: StructuralEdit, host_sheet: str) -> Node:
    if isinstance(node, CellRef):
        if not _on_edited_sheet(node.sheet, host_sheet, edit):
            return node
        if edit.kind.is_rows:
            row = shift_index(node.row, edit)
            if row is None or row > MAX_ROWS:
                return _REF_GONE  # deleted, or pushed off the grid edge
            return node if row == node.row else CellRef(node.col, row, node.sheet, node.col_abs, node.row_abs)
        col = shift_index(node.col, edit)
        if col is None or col > MAX_COLS:
            return _REF_GONE
        return node if col == node.col else CellRef(col, node.row, node.sheet, node.col_abs, node.row_abs)
    if isinstance(node, RangeRef):
        if not _on_edited_sheet(node.start.sheet, host_sheet, edit):
            return node
        if edit.kind.is_rows:
            span = shift_span(node.start.row, node.end.row, edit)
            if span is None or span[0] > MAX_ROWS:
                return _REF_GONE
            lo, hi = span[0], min(span[1], MAX_ROWS)
            if (lo, hi) == (node.start.row, node.end.row):
                return node
            start = CellRef(node.start.col, lo, node.start.sheet, node.start.col_abs, node.start.row_abs)
            end = CellRef(node.end.col, hi, None, node.end.col_abs, node.end.row_abs)
            return RangeRef(start, end)
        span = shift_span(node.start.col, node.end.col, edit)
        if span is None or span[0] > MAX_COLS:
            return _REF_GONE
        lo, hi = span[0], min(span[1], MAX_COLS)
        if (lo, hi) == (node.start.col, node.end.col):
            return node
        start = CellRef(lo, node.start.row, node.start.sheet, node.start.col_abs, node.start.row_abs)
        end = CellRef(hi, node.end.row, None, node.end.col_abs, node.end.row_abs)
        return RangeRef(start, end)
    if isinstance(node, Unary):
        return Unary(node.op, _adjust(node.operand, edit, host_sheet))
    if isinstance(node, Binary):
        return Binary(node.op, _adjust(node.lhs, edit, host_sheet), _adjust(node.rhs, edit, host_sheet))
    if isinstance(node, Call):
        return Call(node.fn, tuple(_adjust(a, edit, host_sheet) for a in node.args))
    return node


def relative_form(node: Node, host: CellAddress) -> str:
    """Serialize a formula with references as offsets from the host cell.

    Two formulas in different cells get the same relative form exactly
    when they follow the same fill pattern, which is what the neighbor
    consistency rule compares.  Absolute coordinates stay absolute.
    """
    return _rel(node, host)


def _rel_ref(ref: CellRef, host: CellAddress) -> str:
    out = ""
    if ref.sheet is not None and ref.sheet != host.sheet:
        out += ref.sheet + "!"
    out += f"C{ref.col}" if ref.col_abs else f"C[{ref.col - host.col}]"
    out += f"R{ref.row}" if ref.row_abs else f"R[{ref.row - host.row}]"
    return out


def _rel(node: Node, host: CellAddress) -> str:
    if isinstance(node, CellRef):
        return _rel_ref(node, host)
    if isinstance(node, RangeRef):
        return _rel_ref(node.start, host) + ":" + _rel_ref(node.end, host)
    if isinstance(node, Unary):
        return node.op + "(" + _rel(node.operand, host) + ")"
    if isinstance(node, Binary):
        return "(" + _rel(node.lhs, host) + node.op + _rel(node.rhs, host) + ")"
    if isinstance(node, Call):
        return node.fn + "(" + ",".join(_rel(a, host) for a in node.args) + ")"
    from .printer import _emit  # literals render exactly as in canonical text

    return _emit(node)
