"""Cell addressing: A1 notation, sheet-qualified addresses, grid bounds."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import AddressSyntaxError, OutOfRange

MAX_COLS = 16384      # columns A..XFD
MAX_ROWS = 1048576

_UNQUOTED_SHEET = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_A1 = re.compile(r"^([A-Za-z]{1,3})([0-9]+)$")


def column_letters(col: int) -> str:
    """1-based column index to letters: 1 -> A, 27 -> AA."""
    if col < 1:
        raise ValueError(f"column index must be >= 1, got {col}")
    out = []
    while col:
        col, rem = divmod(col - 1, 26)
        out.append(chr(ord("A") + rem))
    return "".join(reversed(out))


def column_index(letters: str) -> int:
    """Letters to 1-based column index: A -> 1, AA -> 27."""
    col = 0
    for ch in letters.upper():
        if not "A" <= ch <= "Z":
            raise AddressSyntaxError(f"bad column letters: {letters!r}")
        col = col * 26 + (ord(ch) - ord("A") + 1)
    return col


def quote_sheet(name: str) -> str:
    if _UNQUOTED_SHEET.match(name):
        return name
    return "'" + name.replace("'", "''") + "'"


@dataclass(frozen=True, order=True)
class CellAddress:
    """Sheet-qualified 1-based cell coordinate."""

    sheet: str
    col: int
    row: int

    def __post_init__(self):
        if self.col < 1 or self.row < 1:
            raise OutOfRange(f"cell coordinates are 1-based: col={self.col}, row={self.row}")
        if not self.sheet:
            raise AddressSyntaxError("sheet name must be nonempty")

    def text(self) -> str:
        return f"{quote_sheet(self.sheet)}!{column_letters(self.col)}{self.row}"

    def local_text(self) -> str:
        return f"{column_letters(self.col)}{self.row}"

    def __str__(self):
        return self.text()


def parse_local_ref(ref: str) -> tuple[int, int]:
    """Parse a bare A1 reference (no sheet, no $) into (col, row)."""
    m = _A1.match(ref)
    if not m:
        raise AddressSyntaxError(f"not an A1 reference: {ref!r}")
    col = column_index(m.group(1))
    row = int(m.group(2))
    if row < 1:
        raise AddressSyntaxError(f"row must be >= 1 in {ref!r}")
    return col, row


def _split_sheet(text: str) -> tuple[str | None, str]:
    if text.startswith("'"):
        end = 1
        buf = []
        while end < len(text):
            if text[end] == "'":
                if end + 1 < len(text) and text[end + 1] == "'":
                    buf.append("'")
                    end += 2
                    continue
                break
            buf.append(text[end])
            end += 1
        if end >= len(text) or text[end] != "'" or end + 1 >= len(text) or text[end + 1] != "!":
            raise AddressSyntaxError(f"bad quoted sheet prefix in {text!r}")
        return "".join(buf), text[end + 2:]
    if "!" in text:
        sheet, rest = text.split("!", 1)
        if not _UNQUOTED_SHEET.match(sheet):
            raise AddressSyntaxError(f"bad sheet name in {text!r}")
        return sheet, rest
    return None, text


def parse_address(text: str, default_sheet: str | None = None) -> CellAddress:
    """Parse ``Sheet!B2`` (or ``B2`` with a default sheet) into an address.

    Round-trips with :meth:`CellAddress.text` exactly.
    """
    sheet, rest = _split_sheet(text)
    if sheet is None:
        sheet = default_sheet
    if sheet is None:
        raise AddressSyntaxError(f"address needs a sheet qualifier: {text!r}")
    col, row = parse_local_ref(rest)
    return CellAddress(sheet, col, row)


@dataclass(frozen=True)
class RangeAddress:
    """Rectangular sheet-qualified range, normalized corner order."""

    sheet: str
    start_col: int
    start_row: int
    end_col: int
    end_row: int

    def __post_init__(self):
        if self.start_col > self.end_col or self.start_row > self.end_row:
            raise AddressSyntaxError("range corners must be normalized")

    def text(self) -> str:
        a = f"{column_letters(self.start_col)}{self.start_row}"
        b = f"{column_letters(self.end_col)}{self.end_row}"
        return f"{quote_sheet(self.sheet)}!{a}:{b}"

    def cells(self):
        for row in range(self.start_row, self.end_row + 1):
            for col in range(self.start_col, self.end_col + 1):
                yield CellAddress(self.sheet, col, row)

    def contains(self, addr: CellAddress) -> bool:
        return (
            addr.sheet == self.sheet
            and self.start_col <= addr.col <= self.end_col
            and self.start_row <= addr.row <= self.end_row
        )

    def __str__(self):
        return self.text()


def parse_range(text: str, default_sheet: str | None = None) -> RangeAddress:
    sheet, rest = _split_sheet(text)
    if sheet is None:
        sheet = default_sheet
    if sheet is None:
        raise AddressSyntaxError(f"range needs a sheet qualifier: {text!r}")
    if ":" not in rest:
        col, row = parse_local_ref(rest)
        return RangeAddress(sheet, col, row, col, row)
    a, b = rest.split(":", 1)
    c1, r1 = parse_local_ref(a)
    c2, r2 = parse_local_ref(b)
    return RangeAddress(sheet, min(c1, c2), min(r1, r2), max(c1, c2), max(r1, r2))


def check_bounds(col: int, row: int):
    if not (1 <= col <= MAX_COLS) or not (1 <= row <= MAX_ROWS):
        raise OutOfRange(f"cell ({column_letters(max(col, 1))}{row}) outside the grid bounds")
