"""User-specified test scenarios.

A scenario names role-marked cells (through relocation-tracked hidden
names), supplies input values, and states expected values or intervals
for intermediate and output cells.  Running one populates the inputs on
a snapshot, recalculates, and compares actuals against expectations;
the live workbook is never touched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .addressing import CellAddress
from .calc import build_graph, recalculate
from .errors import (
    InputIsFormula,
    OutputNotFormula,
    RoleConflict,
    UnknownName,
)
from .findings import Finding, FindingLocation, Severity, make_finding
from .grid import DANGLING, FrozenWorkbook, Workbook
from .guardian import CellRole
from .inspections import StaticRuleConfig, run_static_rules
from .validation import evaluate_rules
from .values import BLANK, CellError, CellValue, display_text

SCENARIO_RULE = "SG-T1-scenario"
ENGINE_RULE = "SG-E1-engine"

_ROLE_PREFIX = {
    CellRole.INPUT: "sg_in_",
    CellRole.INTERMEDIATE: "sg_mid_",
    CellRole.OUTPUT: "sg_out_",
}


@dataclass(frozen=True)
class ExactExpectation:
    target: str
    value: float
    abs_tol: float = 1e-6

    def __post_init__(self):
        if not (self.abs_tol >= 0 and self.abs_tol == self.abs_tol and self.abs_tol != float("inf")):
            raise ValueError(f"tolerance must be finite and >= 0, got {self.abs_tol}")

    def describe(self) -> str:
        return f"= {self.value:g} (±{self.abs_tol:g})"


@dataclass(frozen=True)
class IntervalExpectation:
    target: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval: [{self.lo}, {self.hi}]")

    def describe(self) -> str:
        return f"in [{self.lo:g} .. {self.hi:g}]"


@dataclass(frozen=True)
class TextExpectation:
    target: str
    text: str

    def describe(self) -> str:
        return f'= "{self.text}" (case-insensitive)'


Expectation = Union[ExactExpectation, IntervalExpectation, TextExpectation]


@dataclass(frozen=True)
class TestScenario:
    __test__ = False  # "Test" prefix is domain language, not a pytest class

    name: str
    inputs: dict[str, CellValue] = field(default_factory=dict)
    expectations: tuple[Expectation, ...] = ()
    created_at: str = ""
    allow_formula_override: bool = False


@dataclass(frozen=True)
class ValidationIssue:
    code: str   # missing-input | missing-output-expectation | bad-input-value |
                # deleted-cell | input-overrides-formula
    message: str
    subjects: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationVerdict:
    ok: bool
    issues: tuple[ValidationIssue, ...] = ()


@dataclass(frozen=True)
class ExpectationResult:
    target: str
    address: CellAddress | None
    state: str  # pass | fail | error
    actual: CellValue | None
    expected: str
    reason: str = ""


@dataclass(frozen=True)
class ScenarioResult:
    scenario: str
    results: tuple[ExpectationResult, ...]
    problems: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.problems and all(r.state == "pass" for r in self.results)


def mark_roles(wb: Workbook, markings: list[tuple[CellAddress, CellRole]]) -> list[str]:
    """Assign roles to cells, binding a fresh hidden name per cell.

    Marking the same cell with the same role again returns the existing
    name; a different role raises RoleConflict.  One generation bump for
    the whole call.
    """
    by_addr: dict[CellAddress, tuple[str, CellRole]] = {}
    for name, role in wb.guardian.roles.items():
        target = wb.names.get(name)
        if isinstance(target, CellAddress):
            by_addr[target] = (name, role)

    # Validate the whole batch before binding anything, so a bad entry
    # cannot leave the workbook half-marked.
    pending: dict[CellAddress, CellRole] = {}
    for addr, role in markings:
        wb.sheet(addr.sheet)
        existing = by_addr.get(addr)
        if existing is not None:
            if existing[1] is not role:
                raise RoleConflict(
                    f"{addr} already marked {existing[1].value}, cannot mark {role.value}"
                )
            continue
        if addr in pending:
            if pending[addr] is not role:
                raise RoleConflict(
                    f"{addr} marked twice with different roles in one call"
                )
            continue
        content = wb.cell(addr)
        if role is CellRole.INPUT and content.is_formula:
            raise InputIsFormula(f"{addr} holds a formula; input cells must hold data")
        if role is CellRole.OUTPUT and not content.is_formula:
            raise OutputNotFormula(f"{addr} holds no formula; output cells must be computed")
        pending[addr] = role

    out: list[str] = []
    for addr, role in markings:
        existing = by_addr.get(addr)
        if existing is not None:
            out.append(existing[0])
            continue
        name = _fresh_name(wb, _ROLE_PREFIX[role])
        wb.bind_name(name, addr)
        wb.guardian.roles[name] = role
        by_addr[addr] = (name, role)
        out.append(name)
    wb.generation += 1
    return out


def _fresh_name(wb: Workbook, prefix: str) -> str:
    n = 1
    while f"{prefix}{n}" in wb.names:
        n += 1
    return f"{prefix}{n}"


def add_scenario(wb: Workbook, scenario: TestScenario):
    """Store a scenario after checking its name references.

    Inputs must target input-role names; expectations must target
    intermediate or output-role names.
    """
    for name in scenario.inputs:
        _require_role(wb, name, (CellRole.INPUT,))
    for exp in scenario.expectations:
        _require_role(wb, exp.target, (CellRole.INTERMEDIATE, CellRole.OUTPUT))
    wb.guardian.scenarios[scenario.name] = scenario
    wb.generation += 1


def _require_role(wb: Workbook, name: str, allowed: tuple[CellRole, ...]):
    wb.resolve_name(name)  # raises UnknownName for unbound names
    role = wb.guardian.roles.get(name)
    if role is None:
        raise UnknownName(name)
    if role not in allowed:
        raise RoleConflict(
            f"{name} is marked {role.value}; expected {' or '.join(r.value for r in allowed)}"
        )


def _closure(edges: dict, roots: list[CellAddress]) -> set[CellAddress]:
    """Every cell transitively referenced from the roots, roots included."""
    seen: set[CellAddress] = set()
    stack = list(roots)
    while stack:
        addr = stack.pop()
        if addr in seen:
            continue
        seen.add(addr)
        for precedent in edges.get(addr, ()):
            if precedent not in seen:
                stack.append(precedent)
    return seen


def validate_scenario(wb: Workbook | FrozenWorkbook, scenario: TestScenario) -> ValidationVerdict:
    """Check a scenario's specification against the current workbook.

    Issues cover: inputs missing a data cell the tested outputs read;
    outputs that depend on tested formulas but carry no expectation;
    input values no formula could consume; marked cells that were
    deleted.  Whether the expected values themselves are right is what
    running the scenario answers, so it is deliberately not checked
    here.
    """
    snapshot = wb if isinstance(wb, FrozenWorkbook) else wb.snapshot()
    issues: list[ValidationIssue] = []

    input_addrs: set[CellAddress] = set()
    for name in scenario.inputs:
        target = snapshot.resolve_name(name)
        if target is DANGLING:
            issues.append(
                ValidationIssue("deleted-cell", f"marked cell for input {name!r} was deleted", (name,))
            )
        elif isinstance(target, CellAddress):
            input_addrs.add(target)
            content = snapshot.cell(target)
            if content.is_formula and not scenario.allow_formula_override:
                issues.append(
                    ValidationIssue(
                        "input-overrides-formula",
                        f"input {name!r} now targets a formula cell {target}; "
                        "the override would mask the logic under test",
                        (name,),
                    )
                )

    target_addrs: list[CellAddress] = []
    expected_names: set[str] = set()
    for exp in scenario.expectations:
        expected_names.add(exp.target)
        target = snapshot.resolve_name(exp.target)
        if target is DANGLING:
            issues.append(
                ValidationIssue(
                    "deleted-cell", f"marked cell for expectation {exp.target!r} was deleted", (exp.target,)
                )
            )
        elif isinstance(target, CellAddress):
            target_addrs.append(target)

    edges = build_graph(snapshot).edges
    closure = _closure(edges, target_addrs)
    data_cells = {
        addr for addr in closure
        if snapshot.has_sheet(addr.sheet) and snapshot.cell(addr).is_value
    }
    missing = sorted(a.text() for a in data_cells - input_addrs)
    if missing:
        issues.append(
            ValidationIssue(
                "missing-input",
                "tested outputs read data cells not covered by inputs: " + ", ".join(missing),
                tuple(missing),
            )
        )

    tested_formulas = {
        addr for addr in closure
        if snapshot.has_sheet(addr.sheet) and snapshot.cell(addr).is_formula
    }
    for name, role in snapshot.guardian.roles.items():
        if role is not CellRole.OUTPUT or name in expected_names:
            continue
        target = snapshot.names.get(name)
        if not isinstance(target, CellAddress):
            continue
        reach = _closure(edges, [target])
        if reach & tested_formulas:
            issues.append(
                ValidationIssue(
                    "missing-output-expectation",
                    f"output {name!r} ({target}) depends on tested formulas but has no expectation",
                    (name,),
                )
            )

    for name, value in scenario.inputs.items():
        if isinstance(value, CellError):
            issues.append(
                ValidationIssue(
                    "bad-input-value",
                    f"input {name!r} carries an error value {display_text(value)}",
                    (name,),
                )
            )

    return ValidationVerdict(ok=not issues, issues=tuple(issues))


def run_scenario(snapshot: FrozenWorkbook, scenario: TestScenario) -> ScenarioResult:
    """Populate inputs, recalculate, compare actuals with expectations."""
    overrides: dict[CellAddress, CellValue] = {}
    problems: list[str] = []
    for name, value in scenario.inputs.items():
        target = snapshot.resolve_name(name)
        if target is DANGLING:
            problems.append(f"input {name!r}: marked cell was deleted")
            continue
        if not isinstance(target, CellAddress):
            problems.append(f"input {name!r}: bound to a range, expected a single cell")
            continue
        if snapshot.cell(target).is_formula and not scenario.allow_formula_override:
            problems.append(
                f"input {name!r}: {target} now holds a formula; override skipped"
            )
            continue
        overrides[target] = value

    state = recalculate(snapshot, overrides)

    results: list[ExpectationResult] = []
    for exp in scenario.expectations:
        target = snapshot.resolve_name(exp.target)
        if target is DANGLING:
            results.append(
                ExpectationResult(exp.target, None, "error", None, exp.describe(),
                                  "marked cell was deleted")
            )
            continue
        if not isinstance(target, CellAddress):
            results.append(
                ExpectationResult(exp.target, None, "error", None, exp.describe(),
                                  "expectation target is a range")
            )
            continue
        actual = state.value(target)
        results.append(_judge(exp, target, actual))
    return ScenarioResult(scenario.name, tuple(results), tuple(problems))


def _judge(exp: Expectation, addr: CellAddress, actual: CellValue) -> ExpectationResult:
    if isinstance(actual, CellError):
        return ExpectationResult(exp.target, addr, "error", actual, exp.describe(),
                                 f"cell evaluated to {display_text(actual)}")
    if isinstance(exp, TextExpectation):
        if not isinstance(actual, str):
            return ExpectationResult(exp.target, addr, "fail", actual, exp.describe(),
                                     f"expected text, got {display_text(actual)!r}")
        if actual.casefold() == exp.text.casefold():
            return ExpectationResult(exp.target, addr, "pass", actual, exp.describe())
        return ExpectationResult(exp.target, addr, "fail", actual, exp.describe(),
                                 f"got {actual!r}")
    # numeric expectations
    if isinstance(actual, bool) or not isinstance(actual, (int, float)):
        shown = display_text(actual) if actual is not BLANK else "blank"
        return ExpectationResult(exp.target, addr, "fail", actual, exp.describe(),
                                 f"expected a number, got {shown}")
    value = float(actual)
    if isinstance(exp, ExactExpectation):
        if abs(value - exp.value) <= exp.abs_tol:
            return ExpectationResult(exp.target, addr, "pass", value, exp.describe())
        return ExpectationResult(exp.target, addr, "fail", value, exp.describe(),
                                 f"got {value:g}, off by {value - exp.value:g}")
    if isinstance(exp, IntervalExpectation):
        if exp.lo <= value <= exp.hi:
            return ExpectationResult(exp.target, addr, "pass", value, exp.describe())
        return ExpectationResult(exp.target, addr, "fail", value, exp.describe(),
                                 f"got {value:g}, outside the interval")
    raise TypeError(f"not an expectation: {exp!r}")


def scenario_findings(result: ScenarioResult, snapshot: FrozenWorkbook) -> list[Finding]:
    """One finding per failed or errored expectation (and per problem)."""
    out: list[Finding] = []
    for r in result.results:
        if r.state == "pass":
            continue
        loc = FindingLocation(r.address, name=r.target)
        message = (
            f"scenario {result.scenario!r}: {r.target} expected {r.expected}"
            f" but {r.reason}"
        )
        out.append(
            make_finding(
                SCENARIO_RULE,
                Severity.FAULT_INDICATOR,
                [loc],
                message,
                payload={"scenario": result.scenario, "target": r.target},
                generation=snapshot.generation,
            )
        )
    for problem in result.problems:
        out.append(
            make_finding(
                SCENARIO_RULE,
                Severity.FAULT_INDICATOR,
                [FindingLocation(None, name=f"scenario:{result.scenario}")],
                f"scenario {result.scenario!r}: {problem}",
                payload={"scenario": result.scenario, "problem": problem},
                generation=snapshot.generation,
            )
        )
    return out


def run_all(snapshot: FrozenWorkbook, config: StaticRuleConfig | None = None) -> list[Finding]:
    """Everything at once: static rules, validation rules, scenarios.

    Deterministic order; a crashing rule becomes an engine-error finding
    instead of taking the inspection down.
    """
    config = config or StaticRuleConfig()
    findings: list[Finding] = []
    try:
        findings.extend(run_static_rules(snapshot, config))
    except Exception as exc:  # pragma: no cover - defensive
        findings.append(_engine_error(snapshot, "static rules", exc))
    try:
        findings.extend(evaluate_rules(snapshot))
    except Exception as exc:
        findings.append(_engine_error(snapshot, "validation rules", exc))
    for name in sorted(snapshot.guardian.scenarios):
        scenario = snapshot.guardian.scenarios[name]
        try:
            result = run_scenario(snapshot, scenario)
            findings.extend(scenario_findings(result, snapshot))
        except Exception as exc:
            findings.append(_engine_error(snapshot, f"scenario {name!r}", exc))
    return findings


def _engine_error(snapshot: FrozenWorkbook, stage: str, exc: Exception) -> Finding:
    return make_finding(
        ENGINE_RULE,
        Severity.FAULT_INDICATOR,
        [FindingLocation(None, name="engine")],
        f"{stage} failed internally: {exc!r}",
        payload={"stage": stage},
        generation=snapshot.generation,
    )
