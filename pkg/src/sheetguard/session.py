"""Single-writer document session.

Every mutation of a workbook goes through one session, which serializes
writers, bumps the generation and notifies edit listeners (the live
engine).  Readers take immutable snapshots and work off-lock.
"""

from __future__ import annotations

import threading
from typing import Callable

from .addressing import CellAddress
from .edits import StructuralEdit
from .errors import UnknownName
from .findings import FindingFlag
from .grid import CellContent, EditReceipt, FrozenWorkbook, Workbook
from .guardian import CellRole
from .inspections import StaticRuleConfig
from .scenarios import (
    ScenarioResult,
    TestScenario,
    ValidationVerdict,
    add_scenario,
    mark_roles,
    run_scenario,
    validate_scenario,
)
from .storage import load_workbook, save_file
from .validation import compile_rule

Listener = Callable[[EditReceipt], None]


class DocumentSession:
    def __init__(self, workbook: Workbook, path: str | None = None,
                 rule_config: StaticRuleConfig | None = None):
        self._lock = threading.RLock()
        self.workbook = workbook
        self.path = path
        self.rule_config = rule_config or StaticRuleConfig()
        self._listeners: list[Listener] = []

    # --- listeners ---

    def add_listener(self, listener: Listener) -> None:
        self._listeners.append(listener)

    def _notify(self, receipt: EditReceipt) -> None:
        for listener in self._listeners:
            listener(receipt)

    # --- reads ---

    @property
    def generation(self) -> int:
        with self._lock:
            return self.workbook.generation

    def snapshot(self) -> FrozenWorkbook:
        with self._lock:
            return self.workbook.snapshot()

    def workbook_doc(self) -> tuple[int, dict, dict]:
        """(generation, file document, computed display values per sheet).

        The value map gives consumers what each cell shows after a full
        recalculation, which the file document alone cannot (it stores
        formula text, not results).
        """
        from .calc import recalculate
        from .storage import workbook_to_doc
        from .values import display_text

        with self._lock:
            snapshot = self.workbook.snapshot()
            doc = workbook_to_doc(self.workbook)
        state = recalculate(snapshot)
        values: dict[str, dict[str, str]] = {name: {} for name in snapshot.sheet_names}
        for addr, value in state.values.items():
            values[addr.sheet][addr.local_text()] = display_text(value)
        return snapshot.generation, doc, values

    # --- cell edits ---

    def set_cell(self, addr: CellAddress, content: CellContent) -> EditReceipt:
        with self._lock:
            receipt = self.workbook.set_cell(addr, content)
        self._notify(receipt)
        return receipt

    def set_cells(self, edits: list[tuple[CellAddress, CellContent]]) -> EditReceipt:
        """Apply a batch of cell writes; one receipt for the batch."""
        with self._lock:
            changed: list[CellAddress] = []
            for addr, content in edits:
                receipt = self.workbook.set_cell(addr, content)
                changed.extend(receipt.changed)
            receipt = EditReceipt(self.workbook.generation, changed=tuple(changed))
        self._notify(receipt)
        return receipt

    def apply_structural(self, edit: StructuralEdit) -> EditReceipt:
        with self._lock:
            receipt = self.workbook.apply_structural_edit(edit)
        self._notify(receipt)
        return receipt

    # --- guardian edits ---

    def mark_roles(self, markings: list[tuple[CellAddress, CellRole]]) -> list[str]:
        with self._lock:
            names = mark_roles(self.workbook, markings)
            receipt = EditReceipt(self.workbook.generation)
        self._notify(receipt)
        return names

    def add_scenario(self, scenario: TestScenario) -> None:
        with self._lock:
            add_scenario(self.workbook, scenario)
            receipt = EditReceipt(self.workbook.generation)
        self._notify(receipt)

    def add_validation_rule(self, source: str):
        with self._lock:
            rule = compile_rule(source)
            self.workbook.guardian.validation_rules.append(rule)
            self.workbook.generation += 1
            receipt = EditReceipt(self.workbook.generation)
        self._notify(receipt)
        return rule

    def set_flag(self, flag: FindingFlag) -> None:
        with self._lock:
            self.workbook.guardian.flags[flag.key] = flag
            self.workbook.generation += 1
            receipt = EditReceipt(self.workbook.generation)
        self._notify(receipt)

    def set_rule_config(self, config: StaticRuleConfig) -> None:
        with self._lock:
            self.rule_config = config
            self.workbook.generation += 1
            receipt = EditReceipt(self.workbook.generation)
        self._notify(receipt)

    # --- scenarios ---

    def scenarios(self) -> list[TestScenario]:
        with self._lock:
            return list(self.workbook.guardian.scenarios.values())

    def run_scenario_by_name(self, name: str) -> ScenarioResult:
        snapshot = self.snapshot()
        scenario = snapshot.guardian.scenarios.get(name)
        if scenario is None:
            raise UnknownName(name)
        return run_scenario(snapshot, scenario)

    def validate_scenario_by_name(self, name: str) -> ValidationVerdict:
        snapshot = self.snapshot()
        scenario = snapshot.guardian.scenarios.get(name)
        if scenario is None:
            raise UnknownName(name)
        return validate_scenario(snapshot, scenario)

    # --- persistence ---

    def save(self, path: str | None = None) -> None:
        with self._lock:
            save_file(self.workbook, path or self.path)

    def reload_from_bytes(self, data: bytes) -> EditReceipt:
        """Replace the whole document (watch mode after an external save).

        The generation keeps counting up so downstream consumers see the
        reload as one more edit.
        """
        fresh = load_workbook(data)
        with self._lock:
            fresh.generation = self.workbook.generation + 1
            self.workbook = fresh
            receipt = EditReceipt(fresh.generation, structural=True)
        self._notify(receipt)
        return receipt
