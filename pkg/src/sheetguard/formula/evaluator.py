"""Formula evaluation over a cell-value resolver.

Failures are returned as error values, never raised: errors propagate
through every operator and function except IF's untaken branch and
COUNT.  Blank coerces to 0 in arithmetic and "" in concatenation; text
comparison is case-insensitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from ..addressing import CellAddress
from ..values import (
    BLANK,
    DIV0,
    NA,
    REF_ERROR,
    VALUE_ERROR,
    CellError,
    CellValue,
    display_text,
)
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

Resolver = Callable[[CellAddress], CellValue]


@dataclass
class _Range:
    """Materialized range contents, row-major."""

    sheet: str
    start_col: int
    start_row: int
    end_col: int
    end_row: int
    rows: list[list[CellValue]]

    @property
    def width(self) -> int:
        return self.end_col - self.start_col + 1


def evaluate(node: Node, resolver: Resolver, host_sheet: str) -> CellValue:
    """Evaluate a formula; the resolver must be total (BLANK for empty)."""
    out = _eval(node, resolver, host_sheet)
    if isinstance(out, _Range):
        return VALUE_ERROR  # a bare range is not a scalar result
    return out


def _eval(node: Node, resolver: Resolver, sheet: str):
    if isinstance(node, NumberLit):
        return float(node.value)
    if isinstance(node, TextLit):
        return node.value
    if isinstance(node, BoolLit):
        return node.value
    if isinstance(node, ErrorLit):
        return CellError(node.kind)
    if isinstance(node, CellRef):
        return resolver(CellAddress(node.sheet or sheet, node.col, node.row))
    if isinstance(node, RangeRef):
        rsheet = node.start.sheet or sheet
        rows = [
            [resolver(CellAddress(rsheet, c, r)) for c in range(node.start.col, node.end.col + 1)]
            for r in range(node.start.row, node.end.row + 1)
        ]
        return _Range(rsheet, node.start.col, node.start.row, node.end.col, node.end.row, rows)
    if isinstance(node, Unary):
        val = _scalar(_eval(node.operand, resolver, sheet))
        num = _to_number(val)
        if isinstance(num, CellError):
            return num
        return -num
    if isinstance(node, Binary):
        return _binary(node, resolver, sheet)
    if isinstance(node, Call):
        return _call(node, resolver, sheet)
    raise TypeError(f"not a formula node: {node!r}")


def _scalar(val) -> CellValue:
    if isinstance(val, _Range):
        return VALUE_ERROR
    return val


def _to_number(val: CellValue) -> float | CellError:
    if isinstance(val, CellError):
        return val
    if isinstance(val, bool):
        return 1.0 if val else 0.0
    if val is BLANK:
        return 0.0
    if isinstance(val, str):
        return VALUE_ERROR
    return float(val)


def _to_text(val: CellValue) -> str | CellError:
    if isinstance(val, CellError):
        return val
    return display_text(val)


_TYPE_RANK = {"number": 0, "text": 1, "bool": 2}


def _typed(val: CellValue) -> tuple[str, CellValue]:
    if isinstance(val, bool):
        return "bool", val
    if isinstance(val, str):
        return "text", val.casefold()
    return "number", float(val)  # blank is coerced before calling


def _compare(op: str, a: CellValue, b: CellValue) -> CellValue:
    # Blank borrows the other side's type: 0 against numbers, "" against
    # text, FALSE against booleans.
    if a is BLANK and b is BLANK:
        a = b = 0.0
    elif a is BLANK:
        a = {"text": "", "bool": False}.get(_typed(b)[0], 0.0)
    elif b is BLANK:
        b = {"text": "", "bool": False}.get(_typed(a)[0], 0.0)
    ta, va = _typed(a)
    tb, vb = _typed(b)
    if ta == tb:
        if op == "=":
            return va == vb
        if op == "<>":
            return va != vb
        if op == "<":
            return va < vb
        if op == "<=":
            return va <= vb
        if op == ">":
            return va > vb
        return va >= vb
    if op == "=":
        return False
    if op == "<>":
        return True
    # Cross-type ordering follows the conventional type rank.
    ra, rb = _TYPE_RANK[ta], _TYPE_RANK[tb]
    if op == "<":
        return ra < rb
    if op == "<=":
        return ra <= rb
    if op == ">":
        return ra > rb
    return ra >= rb


def _binary(node: Binary, resolver: Resolver, sheet: str) -> CellValue:
    lhs = _scalar(_eval(node.lhs, resolver, sheet))
    if isinstance(lhs, CellError):
        return lhs
    rhs = _scalar(_eval(node.rhs, resolver, sheet))
    if isinstance(rhs, CellError):
        return rhs
    op = node.op
    if op == "&":
        a = _to_text(lhs)
        b = _to_text(rhs)
        return a + b  # type: ignore[operator]
    if op in ("=", "<>", "<", "<=", ">", ">="):
        return _compare(op, lhs, rhs)
    a = _to_number(lhs)
    if isinstance(a, CellError):
        return a
    b = _to_number(rhs)
    if isinstance(b, CellError):
        return b
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0:
                return DIV0
            return a / b
        if op == "^":
            out = a ** b
            if isinstance(out, complex):
                return VALUE_ERROR
            return float(out)
    except ZeroDivisionError:
        return DIV0
    except (OverflowError, ValueError):
        return VALUE_ERROR
    raise AssertionError(f"unhandled operator {op!r}")


def _collect_numbers(args, resolver, sheet):
    """Numeric values for the aggregates: range cells keep only numbers,
    direct scalars must coerce.  Returns a list or a propagated error."""
    out: list[float] = []
    for arg in args:
        val = _eval(arg, resolver, sheet)
        if isinstance(val, _Range):
            for row in val.rows:
                for v in row:
                    if isinstance(v, CellError):
                        return v
                    if isinstance(v, bool) or isinstance(v, str) or v is BLANK:
                        continue
                    out.append(float(v))
        else:
            if isinstance(val, CellError):
                return val
            num = _to_number(val)
            if isinstance(num, CellError):
                return num
            out.append(num)
    return out


def _call(node: Call, resolver: Resolver, sheet: str) -> CellValue:
    fn = node.fn
    if fn == "IF":
        cond = _scalar(_eval(node.args[0], resolver, sheet))
        if isinstance(cond, CellError):
            return cond
        if isinstance(cond, str):
            return VALUE_ERROR
        truthy = bool(cond) if isinstance(cond, bool) else (cond is not BLANK and float(cond) != 0.0)
        if truthy:
            return _scalar(_eval(node.args[1], resolver, sheet))
        if len(node.args) == 3:
            return _scalar(_eval(node.args[2], resolver, sheet))
        return False
    if fn == "COUNT":
        count = 0
        for arg in node.args:
            val = _eval(arg, resolver, sheet)
            if isinstance(val, _Range):
                for row in val.rows:
                    for v in row:
                        if not isinstance(v, (bool, str, CellError)) and v is not BLANK:
                            count += 1
            elif not isinstance(val, (bool, str, CellError)) and val is not BLANK:
                count += 1
        return float(count)
    if fn in ("SUM", "AVERAGE", "MIN", "MAX"):
        nums = _collect_numbers(node.args, resolver, sheet)
        if isinstance(nums, CellError):
            return nums
        if fn == "SUM":
            return float(sum(nums))
        if fn == "AVERAGE":
            if not nums:
                return DIV0
            return sum(nums) / len(nums)
        if not nums:
            return 0.0
        return float(min(nums) if fn == "MIN" else max(nums))
    if fn == "ROUND":
        x = _to_number(_scalar(_eval(node.args[0], resolver, sheet)))
        if isinstance(x, CellError):
            return x
        d = _to_number(_scalar(_eval(node.args[1], resolver, sheet)))
        if isinstance(d, CellError):
            return d
        digits = int(d)
        scale = 10.0 ** digits
        scaled = x * scale
        # Half away from zero, the spreadsheet convention.
        return math.floor(abs(scaled) + 0.5) / scale * (1 if x >= 0 else -1)
    if fn == "ABS":
        x = _to_number(_scalar(_eval(node.args[0], resolver, sheet)))
        if isinstance(x, CellError):
            return x
        return abs(x)
    if fn == "VLOOKUP":
        return _vlookup(node, resolver, sheet)
    raise AssertionError(f"unhandled function {fn!r}")


def _vlookup(node: Call, resolver: Resolver, sheet: str) -> CellValue:
    key = _scalar(_eval(node.args[0], resolver, sheet))
    if isinstance(key, CellError):
        return key
    table = _eval(node.args[1], resolver, sheet)
    if not isinstance(table, _Range):
        return VALUE_ERROR
    index = _to_number(_scalar(_eval(node.args[2], resolver, sheet)))
    if isinstance(index, CellError):
        return index
    col = int(index)
    if col < 1 or col > table.width:
        return REF_ERROR
    approximate = True
    if len(node.args) == 4:
        flag = _scalar(_eval(node.args[3], resolver, sheet))
        if isinstance(flag, CellError):
            return flag
        if isinstance(flag, str):
            return VALUE_ERROR
        approximate = bool(flag) if isinstance(flag, bool) else (flag is not BLANK and float(flag) != 0.0)

    key_type, key_cmp = _typed(key) if key is not BLANK else ("number", 0.0)
    match_row: int | None = None
    for i, row in enumerate(table.rows):
        first = row[0]
        if isinstance(first, CellError) or first is BLANK:
            continue
        cell_type, cell_cmp = _typed(first)
        if cell_type != key_type:
            continue
        if approximate:
            if cell_cmp <= key_cmp:  # type: ignore[operator]
                match_row = i  # keep scanning: last row still <= key wins
        elif cell_cmp == key_cmp:
            match_row = i
            break
    if match_row is None:
        return NA
    return table.rows[match_row][col - 1]
