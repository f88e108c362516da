"""The guardian section: everything a workbook carries beyond cell data.

Scenario roles, test scenarios, validation rules and finding flags all
live here so they can travel inside the workbook file and survive
maintenance by users who never run the inspection tooling.
"""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .findings import FindingFlag
    from .scenarios import TestScenario
    from .validation import ValidationRule


class CellRole(enum.Enum):
    INPUT = "input"
    INTERMEDIATE = "intermediate"
    OUTPUT = "output"


@dataclass
class GuardianSpec:
    roles: dict[str, CellRole] = field(default_factory=dict)
    scenarios: dict[str, "TestScenario"] = field(default_factory=dict)
    validation_rules: list["ValidationRule"] = field(default_factory=list)
    flags: dict[str, "FindingFlag"] = field(default_factory=dict)
    # Unknown guardian keys from loaded files, preserved verbatim so a
    # newer tool's data survives an edit-and-save round trip here.
    extra: dict[str, Any] = field(default_factory=dict)

    def copy(self) -> "GuardianSpec":
        # Scenario/rule/flag objects are immutable; copying the
        # containers is enough to isolate a snapshot.
        return GuardianSpec(
            roles=dict(self.roles),
            scenarios=dict(self.scenarios),
            validation_rules=list(self.validation_rules),
            flags=dict(self.flags),
            extra=copy.deepcopy(self.extra),
        )
