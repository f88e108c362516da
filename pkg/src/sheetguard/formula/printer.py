"""Syntax tree -> canonical formula text.

Canonical form: uppercase function names, no spaces, parentheses only
where required by precedence, unary plus dropped, shortest round-trip
number representation.  ``to_text(parse(t))`` is idempotent.
"""

from __future__ import annotations

from ..addressing import column_letters, quote_sheet
from ..values import number_to_text
from .ast import (
    Binary,
    BoolLit,
    Call,
    CellRef,
    ErrorLit,
    Node,
    NumberLit,
    RangeRef,
    TextLit,
    Unary,
)

_PREC = {
    "=": 1, "<>": 1, "<": 1, "<=": 1, ">": 1, ">=": 1,
    "&": 2,
    "+": 3, "-": 3,
    "*": 4, "/": 4,
    "^": 5,
}
_UNARY_PREC = 6
_ATOM_PREC = 7


def _prec(node: Node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary):
        return _UNARY_PREC
    return _ATOM_PREC


def _ref_text(ref: CellRef, with_sheet: bool = True) -> str:
    out = ""
    if with_sheet and ref.sheet is not None:
        out += quote_sheet(ref.sheet) + "!"
    if ref.col_abs:
        out += "$"
    out += column_letters(ref.col)
    if ref.row_abs:
        out += "$"
    out += str(ref.row)
    return out


def _emit(node: Node) -> str:
    if isinstance(node, NumberLit):
        return number_to_text(node.value)
    if isinstance(node, TextLit):
        return '"' + node.value.replace('"', '""') + '"'
    if isinstance(node, BoolLit):
        return "TRUE" if node.value else "FALSE"
    if isinstance(node, ErrorLit):
        return node.kind.value
    if isinstance(node, CellRef):
        return _ref_text(node)
    if isinstance(node, RangeRef):
        return _ref_text(node.start) + ":" + _ref_text(node.end, with_sheet=False)
    if isinstance(node, Unary):
        return node.op + _wrap(node.operand, _UNARY_PREC, right=True)
    if isinstance(node, Binary):
        p = _PREC[node.op]
        return _wrap(node.lhs, p, right=False) + node.op + _wrap(node.rhs, p, right=True)
    if isinstance(node, Call):
        return node.fn + "(" + ",".join(_emit(a) for a in node.args) + ")"
    raise TypeError(f"not a formula node: {node!r}")


def _wrap(node: Node, parent_prec: int, right: bool) -> str:
    text = _emit(node)
    p = _prec(node)
    # Left-associative grammar: an equal-precedence right child only
    # re-parses to the same shape when parenthesized.
    if p < parent_prec or (right and p == parent_prec and isinstance(node, Binary)):
        return "(" + text + ")"
    return text


def to_text(node: Node) -> str:
    """Render a formula tree as canonical text, with the leading ``=``."""
    return "=" + _emit(node)
