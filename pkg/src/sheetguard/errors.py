"""Exception types raised by the document model and its services.

Evaluation failures (division by zero, bad lookups, ...) are *not*
exceptions: they travel as error cell values so they can propagate
through recalculation.  Exceptions are reserved for misuse of the API
and malformed external input.
"""

from __future__ import annotations


class SheetGuardError(Exception):
    """Base class for all errors raised by this package."""


class UnknownSheet(SheetGuardError):
    def __init__(self, sheet: str):
        super().__init__(f"no such sheet: {sheet!r}")
        self.sheet = sheet


class OutOfRange(SheetGuardError):
    """Address or structural edit outside the legal grid bounds."""


class UnknownName(SheetGuardError):
    def __init__(self, name: str):
        super().__init__(f"no such name: {name!r}")
        self.name = name


class BadName(SheetGuardError):
    """Stable name does not match the allowed identifier pattern."""


class RoleConflict(SheetGuardError):
    """Cell already carries a different scenario role."""


class InputIsFormula(SheetGuardError):
    """Input role requires a non-formula cell."""


class OutputNotFormula(SheetGuardError):
    """Output role requires a formula cell."""


class FormulaSyntaxError(SheetGuardError):
    """Formula text could not be parsed.

    ``position`` is a 0-based offset into the source text (including the
    leading ``=``); ``expected`` names what the parser was looking for.
    """

    def __init__(self, position: int, expected: str, found: str = ""):
        detail = f"at position {position}: expected {expected}"
        if found:
            detail += f", found {found!r}"
        super().__init__(detail)
        self.position = position
        self.expected = expected
        self.found = found


class AddressSyntaxError(SheetGuardError):
    """Cell address text is not valid A1 notation."""


class RuleSyntaxError(SheetGuardError):
    """Validation rule source could not be compiled."""


class UnknownRuleId(SheetGuardError):
    def __init__(self, rule_id: str):
        super().__init__(f"unknown inspection rule id: {rule_id!r}")
        self.rule_id = rule_id


class FormatError(SheetGuardError):
    """Workbook file violates the documented schema.

    ``path`` is a dotted JSON path locating the offending key.
    """

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class VersionError(SheetGuardError):
    def __init__(self, version):
        super().__init__(f"unsupported workbook file version: {version!r}")
        self.version = version


class CsvError(SheetGuardError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason
