"""Fully automated inspection rules.

Six hard-coded detectors over a snapshot: repeated references,
references to empty cells, constants in formulas, reading direction,
hidden content (font color equals fill color), and neighbor
inconsistency along uniform formula runs.  All detectors are pure;
same snapshot and config always produce the identical finding list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .addressing import CellAddress, RangeAddress
from .errors import UnknownRuleId
from .findings import Finding, FindingLocation, Severity, make_finding
from .formula import NumberLit, references, relative_form
from .formula.ast import Call, Node, RangeRef, Unary, Binary
from .formula.refs import direct_refs, ranges_in
from .grid import FrozenWorkbook

REPEATED_REF = "SG-R1-repeated-ref"
EMPTY_REF = "SG-R2-empty-ref"
CONSTANT = "SG-R3-constant"
READING_DIRECTION = "SG-R4-reading-direction"
HIDDEN_CONTENT = "SG-R5-hidden-content"
NEIGHBOR_INCONSISTENCY = "SG-R6-neighbor-inconsistency"

# Exempt argument slots whose job is to hold an index, not data.
_INDEX_ARGS = {"VLOOKUP": (2,), "ROUND": (1,)}


@dataclass(frozen=True)
class StaticRuleConfig:
    enabled: frozenset[str] = field(default_factory=lambda: frozenset(ALL_RULE_IDS))
    params: dict = field(default_factory=dict)

    @staticmethod
    def from_json(data: dict) -> "StaticRuleConfig":
        enabled = data.get("enabled", list(ALL_RULE_IDS))
        params = data.get("params", {})
        for rule_id in list(enabled) + list(params):
            if rule_id not in ALL_RULE_IDS:
                raise UnknownRuleId(rule_id)
        return StaticRuleConfig(enabled=frozenset(enabled), params=dict(params))

    def to_json(self) -> dict:
        return {"enabled": sorted(self.enabled), "params": dict(self.params)}

    def param(self, rule_id: str, key: str, default):
        return self.params.get(rule_id, {}).get(key, default)


def detect_repeated_refs(snapshot: FrozenWorkbook, config: StaticRuleConfig) -> list[Finding]:
    out = []
    for addr, content in snapshot.formula_cells():
        refs = references(content.ast, addr.sheet)
        duplicated = sorted(a.text() for a, n in refs.items() if n >= 2)
        if duplicated:
            out.append(
                make_finding(
                    REPEATED_REF,
                    Severity.FAULT_INDICATOR,
                    [FindingLocation(addr)],
                    f"formula reads {', '.join(duplicated)} more than once",
                    payload={"duplicates": duplicated},
                    generation=snapshot.generation,
                )
            )
    return out


def detect_empty_refs(snapshot: FrozenWorkbook, config: StaticRuleConfig) -> list[Finding]:
    out = []
    for addr, content in snapshot.formula_cells():
        empty: set[str] = set()
        for ref in direct_refs(content.ast, addr.sheet):
            if snapshot.has_sheet(ref.sheet) and snapshot.cell(ref).is_empty:
                empty.add(ref.text())
        # A range reference counts only when every covered cell is empty:
        # summing a partially filled column is idiomatic, not anomalous.
        for sheet, c1, r1, c2, r2 in ranges_in(content.ast, addr.sheet):
            if not snapshot.has_sheet(sheet):
                continue
            cells = snapshot.sheet_cells(sheet)
            if all(
                (c, r) not in cells or cells[(c, r)].is_empty
                for r in range(r1, r2 + 1)
                for c in range(c1, c2 + 1)
            ):
                empty.add(RangeAddress(sheet, c1, r1, c2, r2).text())
        if empty:
            offenders = sorted(empty)
            out.append(
                make_finding(
                    EMPTY_REF,
                    Severity.FAULT_INDICATOR,
                    [FindingLocation(addr)],
                    f"formula reads empty cells: {', '.join(offenders)}",
                    payload={"empty": offenders},
                    generation=snapshot.generation,
                )
            )
    return out


def _constants_outside_allowlist(node: Node, allowlist: frozenset[float], exempt: bool) -> list[float]:
    found: list[float] = []
    if isinstance(node, NumberLit):
        if not exempt and node.value not in allowlist:
            found.append(node.value)
    elif isinstance(node, Unary):
        found.extend(_constants_outside_allowlist(node.operand, allowlist, exempt))
    elif isinstance(node, Binary):
        found.extend(_constants_outside_allowlist(node.lhs, allowlist, exempt))
        found.extend(_constants_outside_allowlist(node.rhs, allowlist, exempt))
    elif isinstance(node, Call):
        index_args = _INDEX_ARGS.get(node.fn, ())
        for i, arg in enumerate(node.args):
            found.extend(_constants_outside_allowlist(arg, allowlist, exempt or i in index_args))
    return found


def detect_constants_in_formulas(snapshot: FrozenWorkbook, config: StaticRuleConfig) -> list[Finding]:
    allowlist = frozenset(float(x) for x in config.param(CONSTANT, "allowlist", (0, 1)))
    out = []
    for addr, content in snapshot.formula_cells():
        constants = _constants_outside_allowlist(content.ast, allowlist, exempt=False)
        if constants:
            shown = ", ".join(dict.fromkeys(f"{c:g}" for c in constants))
            out.append(
                make_finding(
                    CONSTANT,
                    Severity.IMPERFECTION,
                    [FindingLocation(addr)],
                    f"formula hard-codes the constant(s) {shown}; consider a referenced cell",
                    payload={"constants": sorted(set(constants))},
                    generation=snapshot.generation,
                )
            )
    return out


def detect_reading_direction(snapshot: FrozenWorkbook, config: StaticRuleConfig) -> list[Finding]:
    out = []
    for addr, content in snapshot.formula_cells():
        offenders = sorted(
            ref.text()
            for ref in references(content.ast, addr.sheet)
            if ref.sheet == addr.sheet
            and (ref.row > addr.row or (ref.row == addr.row and ref.col > addr.col))
        )
        if offenders:
            out.append(
                make_finding(
                    READING_DIRECTION,
                    Severity.IMPERFECTION,
                    [FindingLocation(addr)],
                    "formula reads against the left-to-right, top-to-bottom flow: "
                    + ", ".join(offenders),
                    payload={"offenders": offenders},
                    generation=snapshot.generation,
                )
            )
    return out


def detect_hidden_content(snapshot: FrozenWorkbook, config: StaticRuleConfig) -> list[Finding]:
    referenced: set[CellAddress] = set()
    for addr, content in snapshot.formula_cells():
        referenced.update(references(content.ast, addr.sheet))
    out = []
    for addr, content in snapshot.iter_cells():
        if content.is_empty:
            continue
        fmt = content.format
        if fmt.font_color is None or fmt.fill_color is None:
            continue
        if fmt.font_color.upper() != fmt.fill_color.upper():
            continue
        is_read = addr in referenced
        message = f"cell content is invisible (font {fmt.font_color} on matching fill)"
        if is_read:
            message += "; other formulas read this hidden value"
        out.append(
            make_finding(
                HIDDEN_CONTENT,
                Severity.FAULT_INDICATOR,
                [FindingLocation(addr)],
                message,
                generation=snapshot.generation,
            )
        )
    return out


def _runs(positions: list[int]) -> list[list[int]]:
    runs: list[list[int]] = []
    for p in sorted(positions):
        if runs and p == runs[-1][-1] + 1:
            runs[-1].append(p)
        else:
            runs.append([p])
    return runs


def detect_neighbor_inconsistency(snapshot: FrozenWorkbook, config: StaticRuleConfig) -> list[Finding]:
    min_run = int(config.param(NEIGHBOR_INCONSISTENCY, "min_run", 3))
    out = []
    for sheet in snapshot.sheet_names:
        cells = snapshot.sheet_cells(sheet)
        formulas = {(c, r): content for (c, r), content in cells.items() if content.is_formula}
        by_row: dict[int, list[int]] = {}
        by_col: dict[int, list[int]] = {}
        for c, r in formulas:
            by_row.setdefault(r, []).append(c)
            by_col.setdefault(c, []).append(r)

        def check(run_cells: list[tuple[int, int]], axis: str):
            forms = [
                relative_form(formulas[(c, r)].ast, CellAddress(sheet, c, r))
                for c, r in run_cells
            ]
            counts: dict[str, int] = {}
            for f in forms:
                counts[f] = counts.get(f, 0) + 1
            majority = max(counts, key=lambda f: counts[f])
            if counts[majority] * 2 <= len(run_cells):
                return  # no strict majority: stay quiet rather than guess
            for (c, r), form in zip(run_cells, forms):
                if form != majority:
                    addr = CellAddress(sheet, c, r)
                    out.append(
                        make_finding(
                            NEIGHBOR_INCONSISTENCY,
                            Severity.FAULT_INDICATOR,
                            [FindingLocation(addr)],
                            f"formula breaks the pattern of its {axis} neighbors",
                            payload={"found": form, "axis": axis},
                            generation=snapshot.generation,
                        )
                    )

        for r, cols in by_row.items():
            for run in _runs(cols):
                if len(run) >= min_run:
                    check([(c, r) for c in run], "row")
        for c, rows in by_col.items():
            for run in _runs(rows):
                if len(run) >= min_run:
                    check([(c, r) for r in run], "column")
    return out


RULES = {
    REPEATED_REF: detect_repeated_refs,
    EMPTY_REF: detect_empty_refs,
    CONSTANT: detect_constants_in_formulas,
    READING_DIRECTION: detect_reading_direction,
    HIDDEN_CONTENT: detect_hidden_content,
    NEIGHBOR_INCONSISTENCY: detect_neighbor_inconsistency,
}

ALL_RULE_IDS = tuple(RULES)


def run_static_rules(snapshot: FrozenWorkbook, config: StaticRuleConfig | None = None) -> list[Finding]:
    """Run every enabled detector; findings sorted by sheet, row, column,
    rule id so identical snapshots give identical lists."""
    config = config or StaticRuleConfig()
    sheet_order = {name: i for i, name in enumerate(snapshot.sheet_names)}
    findings: list[Finding] = []
    for rule_id, rule in RULES.items():
        if rule_id in config.enabled:
            findings.extend(rule(snapshot, config))

    def order(f: Finding):
        loc = f.locations[0]
        addr = loc.address
        return (sheet_order.get(addr.sheet, 99), addr.row, addr.col, f.rule_id)

    findings.sort(key=order)
    return findings
