"""sheetguard: continuous spreadsheet inspection.

End users specify test rules once (test scenarios, multi-condition
validation rules); the engine executes them in the background on every
edit and reports findings to whoever maintains the sheet next, alongside
a catalog of fully automated static inspections.
"""

from .addressing import CellAddress, RangeAddress, parse_address, parse_range
from .calc import ComputedState, DependencyGraph, build_graph, recalculate
from .edits import EditKind, StructuralEdit
from .engine import FakeClock, GuardianEngine, SimulatedWorker, run_cycle
from .findings import (
    Finding,
    FindingFlag,
    FindingLocation,
    FlagStatus,
    InspectionReport,
    Severity,
    apply_flags,
    diff_reports,
    finding_key,
)
from .grid import (
    DANGLING,
    CellContent,
    CellFormat,
    EditReceipt,
    FrozenWorkbook,
    Workbook,
)
from .guardian import CellRole, GuardianSpec
from .inspections import ALL_RULE_IDS, StaticRuleConfig, run_static_rules
from .scenarios import (
    ExactExpectation,
    IntervalExpectation,
    ScenarioResult,
    TestScenario,
    TextExpectation,
    ValidationVerdict,
    add_scenario,
    mark_roles,
    run_all,
    run_scenario,
    validate_scenario,
)
from .session import DocumentSession
from .storage import import_csv, load_file, load_workbook, save_file, save_workbook
from .validation import ValidationRule, compile_rule, evaluate_rules
from .values import BLANK, CellError, CellValue, ErrorKind

__version__ = "0.1.0"

__all__ = [
    "BLANK",
    "CellError",
    "CellValue",
    "ErrorKind",
    "CellAddress",
    "RangeAddress",
    "parse_address",
    "parse_range",
    "EditKind",
    "StructuralEdit",
    "Workbook",
    "FrozenWorkbook",
    "CellContent",
    "CellFormat",
    "EditReceipt",
    "DANGLING",
    "GuardianSpec",
    "CellRole",
    "DependencyGraph",
    "ComputedState",
    "build_graph",
    "recalculate",
    "Finding",
    "FindingFlag",
    "FindingLocation",
    "FlagStatus",
    "InspectionReport",
    "Severity",
    "apply_flags",
    "diff_reports",
    "finding_key",
    "StaticRuleConfig",
    "ALL_RULE_IDS",
    "run_static_rules",
    "ValidationRule",
    "compile_rule",
    "evaluate_rules",
    "TestScenario",
    "ExactExpectation",
    "IntervalExpectation",
    "TextExpectation",
    "ScenarioResult",
    "ValidationVerdict",
    "mark_roles",
    "add_scenario",
    "validate_scenario",
    "run_scenario",
    "run_all",
    "GuardianEngine",
    "FakeClock",
    "SimulatedWorker",
    "run_cycle",
    "DocumentSession",
    "load_workbook",
    "save_workbook",
    "load_file",
    "save_file",
    "import_csv",
    "__version__",
]
