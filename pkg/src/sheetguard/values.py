"""Cell value model shared by the grid, the evaluator and the rules.

A cell value is one of:

* ``float``: numbers (integers are stored as floats, like a spreadsheet)
* ``str``: text
* ``bool``: booleans
* ``BLANK``: the empty cell sentinel
* ``CellError``: an error value that propagates through recalculation

``bool`` must always be tested before ``float`` (bool subclasses int).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union


class _Blank:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BLANK"

    def __bool__(self):
        return False


BLANK = _Blank()


class ErrorKind(enum.Enum):
    DIV0 = "#DIV/0!"
    REF = "#REF!"
    NA = "#N/A"
    VALUE = "#VALUE!"
    NAME = "#NAME?"
    CYCLE = "#CYCLE!"


@dataclass(frozen=True)
class CellError:
    kind: ErrorKind

    def __repr__(self):
        return f"CellError({self.kind.value})"


CellValue = Union[float, str, bool, _Blank, CellError]

DIV0 = CellError(ErrorKind.DIV0)
REF_ERROR = CellError(ErrorKind.REF)
NA = CellError(ErrorKind.NA)
VALUE_ERROR = CellError(ErrorKind.VALUE)
NAME_ERROR = CellError(ErrorKind.NAME)
CYCLE = CellError(ErrorKind.CYCLE)


def is_number(v: CellValue) -> bool:
    return isinstance(v, float) and not isinstance(v, bool) or isinstance(v, int) and not isinstance(v, bool)


def is_text(v: CellValue) -> bool:
    return isinstance(v, str)


def is_bool(v: CellValue) -> bool:
    return isinstance(v, bool)


def is_blank(v: CellValue) -> bool:
    return v is BLANK


def is_error(v: CellValue) -> bool:
    return isinstance(v, CellError)


def number_to_text(x: float) -> str:
    """Shortest decimal text that reads back as the same float.

    Integral values print without a decimal point, so a cell holding
    1234567890 displays as ``"1234567890"``.
    """
    if x != x:  # NaN has no spreadsheet representation; keep it explicit
        return "NAN"
    if x in (float("inf"), float("-inf")):
        return "INF" if x > 0 else "-INF"
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def display_text(v: CellValue) -> str:
    """The text a cell shows: what validation conditions match against."""
    if v is BLANK:
        return ""
    if isinstance(v, bool):
        return "TRUE" if v else "FALSE"
    if isinstance(v, CellError):
        return v.kind.value
    if isinstance(v, str):
        return v
    return number_to_text(float(v))


def canonical_scalar(v: CellValue) -> CellValue:
    """Normalize numeric scalars to float so value equality is stable.

    Non-finite numbers are rejected: a stored literal must survive the
    JSON file format, and NaN/Infinity do not.
    """
    if isinstance(v, bool) or isinstance(v, (str, CellError, _Blank)):
        return v
    out = float(v)
    if out != out or out in (float("inf"), float("-inf")):
        raise ValueError(f"cell values must be finite numbers, got {v!r}")
    return out
