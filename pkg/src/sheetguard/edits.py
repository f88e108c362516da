"""Structural edit descriptions shared by the grid and the formula rewriter."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import OutOfRange


class EditKind(enum.Enum):
    INSERT_ROWS = "insert_rows"
    DELETE_ROWS = "delete_rows"
    INSERT_COLS = "insert_cols"
    DELETE_COLS = "delete_cols"

    @property
    def is_rows(self) -> bool:
        return self in (EditKind.INSERT_ROWS, EditKind.DELETE_ROWS)

    @property
    def is_insert(self) -> bool:
        return self in (EditKind.INSERT_ROWS, EditKind.INSERT_COLS)


@dataclass(frozen=True)
class StructuralEdit:
    """Insert or delete ``count`` whole rows/columns at 1-based ``at``."""

    kind: EditKind
    sheet: str
    at: int
    count: int

    def __post_init__(self):
        if self.at < 1:
            raise OutOfRange(f"edit index must be >= 1, got {self.at}")
        if self.count < 0:
            raise OutOfRange(f"edit count must be >= 0, got {self.count}")


def shift_index(index: int, edit: StructuralEdit) -> int | None:
    """New 1-based row/column index after the edit.

    Returns None for indexes inside a deleted span.  Callers pass the
    row index for row edits and the column index for column edits.
    """
    if edit.count == 0:
        return index
    if edit.kind.is_insert:
        return index + edit.count if index >= edit.at else index
    if index < edit.at:
        return index
    if index < edit.at + edit.count:
        return None
    return index - edit.count


def shift_span(lo: int, hi: int, edit: StructuralEdit) -> tuple[int, int] | None:
    """New [lo, hi] span after the edit; None if entirely deleted.

    Deleting a middle slice shrinks the span; inserting inside it grows
    it only when the insertion point is strictly inside (matching how a
    grid stretches a range whose interior gains rows).
    """
    if edit.count == 0:
        return lo, hi
    if edit.kind.is_insert:
        new_lo = lo + edit.count if lo >= edit.at else lo
        new_hi = hi + edit.count if hi >= edit.at else hi
        return new_lo, new_hi
    cut_lo, cut_hi = edit.at, edit.at + edit.count - 1
    if lo >= cut_lo and hi <= cut_hi:
        return None
    new_lo = lo if lo < cut_lo else (lo - edit.count if lo > cut_hi else cut_lo)
    new_hi = hi if hi < cut_lo else (hi - edit.count if hi > cut_hi else cut_lo - 1)
    if new_lo > new_hi:
        return None
    return new_lo, new_hi
