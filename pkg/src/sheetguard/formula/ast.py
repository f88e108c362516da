"""Formula syntax tree.

All nodes are frozen dataclasses, so parsed formulas are immutable and
safe to share between snapshots and analysis workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..values import ErrorKind

# Binary operators in precedence groups, loosest first.
COMPARE_OPS = ("=", "<>", "<=", ">=", "<", ">")
CONCAT_OP = "&"
ADD_OPS = ("+", "-")
MUL_OPS = ("*", "/")
POW_OP = "^"

# fn name -> (min arity, max arity); None means unbounded.
FUNCTIONS: dict[str, tuple[int, int | None]] = {
    "SUM": (1, None),
    "AVERAGE": (1, None),
    "MIN": (1, None),
    "MAX": (1, None),
    "COUNT": (1, None),
    "IF": (2, 3),
    "ROUND": (2, 2),
    "ABS": (1, 1),
    "VLOOKUP": (3, 4),
}


@dataclass(frozen=True)
class NumberLit:
    value: float


@dataclass(frozen=True)
class TextLit:
    value: str


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class ErrorLit:
    """An error baked into the formula text, e.g. ``#REF!`` left behind
    after a structural edit deleted the referenced cells."""

    kind: ErrorKind


@dataclass(frozen=True)
class CellRef:
    col: int
    row: int
    sheet: str | None = None
    col_abs: bool = False
    row_abs: bool = False


@dataclass(frozen=True)
class RangeRef:
    start: CellRef
    end: CellRef

    def __post_init__(self):
        if self.start.col > self.end.col or self.start.row > self.end.row:
            raise ValueError("RangeRef corners must be normalized")


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: "Node"
    rhs: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple["Node", ...]


Node = Union[NumberLit, TextLit, BoolLit, ErrorLit, CellRef, RangeRef, Unary, Binary, Call]


def make_range(a: CellRef, b: CellRef) -> RangeRef:
    """Build a normalized range from two corners, keeping per-axis $ flags
    attached to the coordinate they travel with."""
    if a.col <= b.col:
        c1, c1_abs, c2, c2_abs = a.col, a.col_abs, b.col, b.col_abs
    else:
        c1, c1_abs, c2, c2_abs = b.col, b.col_abs, a.col, a.col_abs
    if a.row <= b.row:
        r1, r1_abs, r2, r2_abs = a.row, a.row_abs, b.row, b.row_abs
    else:
        r1, r1_abs, r2, r2_abs = b.row, b.row_abs, a.row, a.row_abs
    start = CellRef(c1, r1, a.sheet, c1_abs, r1_abs)
    end = CellRef(c2, r2, None, c2_abs, r2_abs)
    return RangeRef(start, end)


def walk(node: Node):
    """Yield every node of the tree, preorder."""
    yield node
    if isinstance(node, Unary):
        yield from walk(node.operand)
    elif isinstance(node, Binary):
        yield from walk(node.lhs)
        yield from walk(node.rhs)
    elif isinstance(node, Call):
        for arg in node.args:
            yield from walk(arg)
    elif isinstance(node, RangeRef):
        yield node.start
        yield node.end
