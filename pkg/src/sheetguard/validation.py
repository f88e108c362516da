"""Multi-condition data validation rules.

A rule walks every row of its scope on every inspection: a row that
violated the rule yesterday keeps violating it today, no matter which
cell the user touched last.  Conditions match against a cell's display
text (numbers print canonically first), so a shape pattern can match a
numeric cell.

Rule sources use the small DSL documented in docs/validation-rules.md::

    rule tariff-code
    scope Data!A2:C10
    when A starts_with "foo"
    require C shape digits(10) "bar"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .addressing import CellAddress, RangeAddress, column_index, parse_range
from .calc import ComputedState, recalculate
from .errors import RuleSyntaxError
from .findings import Finding, FindingLocation, Severity, make_finding
from .grid import FrozenWorkbook
from .values import CellValue, display_text

VALIDATION_RULE = "SG-V1-validation"


# --- condition tree ---

@dataclass(frozen=True)
class NonEmpty:
    def describe(self) -> str:
        return "non_empty"


@dataclass(frozen=True)
class IsNumber:
    def describe(self) -> str:
        return "is_number"


@dataclass(frozen=True)
class IsText:
    def describe(self) -> str:
        return "is_text"


@dataclass(frozen=True)
class StartsWith:
    text: str

    def describe(self) -> str:
        return f'starts_with "{self.text}"'


@dataclass(frozen=True)
class EndsWith:
    text: str

    def describe(self) -> str:
        return f'ends_with "{self.text}"'


@dataclass(frozen=True)
class Contains:
    text: str

    def describe(self) -> str:
        return f'contains "{self.text}"'


@dataclass(frozen=True)
class NumericBetween:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise RuleSyntaxError(f"between bounds out of order: {self.lo} > {self.hi}")

    def describe(self) -> str:
        return f"between {self.lo:g} {self.hi:g}"


@dataclass(frozen=True)
class Digits:
    n: int


@dataclass(frozen=True)
class LiteralText:
    text: str


@dataclass(frozen=True)
class AnyRun:
    pass


ShapeElement = Union[Digits, LiteralText, AnyRun]


@dataclass(frozen=True)
class ShapePattern:
    """Anchored sequence of digit runs, literals and wildcards; must
    consume the whole cell text."""

    elements: tuple[ShapeElement, ...]

    def describe(self) -> str:
        parts = []
        for el in self.elements:
            if isinstance(el, Digits):
                parts.append(f"digits({el.n})")
            elif isinstance(el, LiteralText):
                parts.append(f'"{el.text}"')
            else:
                parts.append("any")
        return "shape " + " ".join(parts)

    def matches(self, text: str) -> bool:
        return _shape_regex(self).fullmatch(text) is not None


_SHAPE_CACHE: dict[ShapePattern, re.Pattern] = {}


def _shape_regex(pattern: ShapePattern) -> re.Pattern:
    rx = _SHAPE_CACHE.get(pattern)
    if rx is None:
        parts = []
        for el in pattern.elements:
            if isinstance(el, Digits):
                parts.append(rf"[0-9]{{{el.n}}}")
            elif isinstance(el, LiteralText):
                parts.append(re.escape(el.text))
            else:
                parts.append(r".*")
        rx = re.compile("".join(parts), re.DOTALL)
        _SHAPE_CACHE[pattern] = rx
    return rx


@dataclass(frozen=True)
class AllOf:
    children: tuple["Condition", ...]

    def describe(self) -> str:
        return "(" + " and ".join(c.describe() for c in self.children) + ")"


@dataclass(frozen=True)
class AnyOf:
    children: tuple["Condition", ...]

    def describe(self) -> str:
        return "(" + " or ".join(c.describe() for c in self.children) + ")"


@dataclass(frozen=True)
class Negate:
    child: "Condition"

    def describe(self) -> str:
        return "not " + self.child.describe()


Condition = Union[
    NonEmpty, IsNumber, IsText, StartsWith, EndsWith, Contains,
    NumericBetween, ShapePattern, AllOf, AnyOf, Negate,
]


def check_condition(cond: Condition, value: CellValue) -> tuple[bool, str | None]:
    """Evaluate a condition; on failure return the first failing path."""
    if isinstance(cond, AllOf):
        for child in cond.children:
            ok, path = check_condition(child, value)
            if not ok:
                return False, path
        return True, None
    if isinstance(cond, AnyOf):
        for child in cond.children:
            ok, _ = check_condition(child, value)
            if ok:
                return True, None
        return False, cond.describe()
    if isinstance(cond, Negate):
        ok, _ = check_condition(cond.child, value)
        return (not ok), (cond.describe() if ok else None)
    ok = _check_leaf(cond, value)
    return ok, (None if ok else cond.describe())


def _check_leaf(cond: Condition, value: CellValue) -> bool:
    text = display_text(value)
    if isinstance(cond, NonEmpty):
        return text != ""
    if isinstance(cond, IsNumber):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(cond, IsText):
        return isinstance(value, str)
    if isinstance(cond, StartsWith):
        return text.startswith(cond.text)
    if isinstance(cond, EndsWith):
        return text.endswith(cond.text)
    if isinstance(cond, Contains):
        return cond.text in text
    if isinstance(cond, NumericBetween):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            return False
        return cond.lo <= float(value) <= cond.hi
    if isinstance(cond, ShapePattern):
        return cond.matches(text)
    raise TypeError(f"not a condition: {cond!r}")


# --- rules ---

@dataclass(frozen=True)
class ValidationRule:
    id: str
    scope: RangeAddress
    guard_col: int | None
    guard: Condition | None
    target_col: int
    requirement: Condition
    source: str


# --- rule source compiler ---

_RULE_TOKENS = re.compile(
    r"""\s*(?:
        (?P<string>"(?:[^"]|"")*")
      | (?P<number>-?\d+(?:\.\d+)?)
      | (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<word>[A-Za-z_][A-Za-z0-9_!:$.-]*)
    )""",
    re.VERBOSE,
)


def _lex_rule(source: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _RULE_TOKENS.match(source, pos)
        if not m or m.end() == pos:
            rest = source[pos:].strip()
            if not rest:
                break
            raise RuleSyntaxError(f"cannot read rule source at: {rest[:20]!r}")
        pos = m.end()
        for kind in ("string", "number", "lparen", "rparen", "word"):
            text = m.group(kind)
            if text is not None:
                tokens.append((kind, text))
                break
    return tokens


class _RuleParser:
    def __init__(self, source: str):
        self.tokens = _lex_rule(source)
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise RuleSyntaxError("unexpected end of rule source")
        self.i += 1
        return tok

    def expect_word(self, *words: str) -> str:
        kind, text = self.next()
        if kind != "word" or (words and text.lower() not in words):
            raise RuleSyntaxError(f"expected {' or '.join(words) or 'a word'}, found {text!r}")
        return text.lower() if words else text

    def at_word(self, *words: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "word" and tok[1].lower() in words

    def string(self) -> str:
        kind, text = self.next()
        if kind != "string":
            raise RuleSyntaxError(f"expected a quoted string, found {text!r}")
        return text[1:-1].replace('""', '"')

    def number(self) -> float:
        kind, text = self.next()
        if kind != "number":
            raise RuleSyntaxError(f"expected a number, found {text!r}")
        return float(text)

    def condition(self) -> Condition:
        node = self.and_expr()
        while self.at_word("or"):
            self.next()
            rhs = self.and_expr()
            if isinstance(node, AnyOf):
                node = AnyOf(node.children + (rhs,))
            else:
                node = AnyOf((node, rhs))
        return node

    def and_expr(self) -> Condition:
        node = self.not_expr()
        while self.at_word("and"):
            self.next()
            rhs = self.not_expr()
            if isinstance(node, AllOf):
                node = AllOf(node.children + (rhs,))
            else:
                node = AllOf((node, rhs))
        return node

    def not_expr(self) -> Condition:
        if self.at_word("not"):
            self.next()
            return Negate(self.not_expr())
        tok = self.peek()
        if tok is not None and tok[0] == "lparen":
            self.next()
            node = self.condition()
            kind, text = self.next()
            if kind != "rparen":
                raise RuleSyntaxError(f"expected ')', found {text!r}")
            return node
        return self.leaf()

    def leaf(self) -> Condition:
        word = self.expect_word()
        lower = word.lower()
        if lower == "non_empty":
            return NonEmpty()
        if lower == "is_number":
            return IsNumber()
        if lower == "is_text":
            return IsText()
        if lower == "starts_with":
            return StartsWith(self.string())
        if lower == "ends_with":
            return EndsWith(self.string())
        if lower == "contains":
            return Contains(self.string())
        if lower == "between":
            return NumericBetween(self.number(), self.number())
        if lower == "shape":
            return self.shape()
        raise RuleSyntaxError(f"unknown condition: {word!r}")

    def shape(self) -> ShapePattern:
        elements: list[ShapeElement] = []
        while True:
            tok = self.peek()
            if tok is None:
                break
            kind, text = tok
            if kind == "string":
                self.next()
                elements.append(LiteralText(text[1:-1].replace('""', '"')))
            elif kind == "word" and text.lower() == "any":
                self.next()
                elements.append(AnyRun())
            elif kind == "word" and text.lower() == "digits":
                self.next()
                kind2, text2 = self.next()
                if kind2 != "lparen":
                    raise RuleSyntaxError("digits needs a parenthesized count")
                n = self.number()
                if n != int(n) or n < 1:
                    raise RuleSyntaxError(f"digits count must be a positive integer, got {n}")
                kind3, text3 = self.next()
                if kind3 != "rparen":
                    raise RuleSyntaxError(f"expected ')' after digits count, found {text3!r}")
                elements.append(Digits(int(n)))
            else:
                break
        if not elements:
            raise RuleSyntaxError("shape needs at least one element")
        return ShapePattern(tuple(elements))


def compile_rule(source: str) -> ValidationRule:
    """Compile rule source text into a normalized rule."""
    p = _RuleParser(source)
    p.expect_word("rule")
    _, rule_id = p.next()
    p.expect_word("scope")
    _, scope_text = p.next()
    try:
        scope = parse_range(scope_text)
    except Exception as exc:
        raise RuleSyntaxError(f"bad scope range {scope_text!r}: {exc}") from None
    guard_col = None
    guard = None
    if p.at_word("when"):
        p.next()
        guard_col = _column(p.expect_word())
        guard = p.condition()
    p.expect_word("require")
    target_col = _column(p.expect_word())
    requirement = p.condition()
    if p.peek() is not None:
        raise RuleSyntaxError(f"unexpected trailing tokens: {p.peek()[1]!r}")
    return ValidationRule(
        id=rule_id,
        scope=scope,
        guard_col=guard_col,
        guard=guard,
        target_col=target_col,
        requirement=requirement,
        source=source,
    )


def _column(word: str) -> int:
    if not re.fullmatch(r"[A-Za-z]{1,3}", word):
        raise RuleSyntaxError(f"expected a column letter, found {word!r}")
    return column_index(word)


# --- execution ---

def evaluate_rules(
    snapshot: FrozenWorkbook,
    rules: list[ValidationRule] | None = None,
    state: ComputedState | None = None,
) -> list[Finding]:
    """Check every in-scope row of every rule against computed values.

    One finding per violating row; dismissing or fixing one row never
    hides another row's violation.
    """
    if rules is None:
        rules = list(snapshot.guardian.validation_rules)
    if not rules:
        return []
    if state is None:
        state = recalculate(snapshot)
    findings: list[Finding] = []
    for rule in rules:
        if not snapshot.has_sheet(rule.scope.sheet):
            continue
        sheet = rule.scope.sheet
        for row in range(rule.scope.start_row, rule.scope.end_row + 1):
            if rule.guard is not None and rule.guard_col is not None:
                guard_value = state.value(CellAddress(sheet, rule.guard_col, row))
                ok, _ = check_condition(rule.guard, guard_value)
                if not ok:
                    continue
            target = CellAddress(sheet, rule.target_col, row)
            ok, path = check_condition(rule.requirement, state.value(target))
            if not ok:
                findings.append(
                    make_finding(
                        VALIDATION_RULE,
                        Severity.FAULT_INDICATOR,
                        [FindingLocation(target)],
                        f"rule {rule.id!r} violated in row {row}: {path}",
                        payload={"rule": rule.id, "failed": path},
                        generation=snapshot.generation,
                    )
                )
    sheet_order = {name: i for i, name in enumerate(snapshot.sheet_names)}
    findings.sort(
        key=lambda f: (
            sheet_order.get(f.locations[0].address.sheet, 99),
            f.locations[0].address.row,
            f.locations[0].address.col,
            f.key,
        )
    )
    return findings
