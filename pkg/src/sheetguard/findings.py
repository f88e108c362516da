"""Finding identity, suppression flags and report diffing.

A finding's key is a content hash over (rule id, locations, payload),
independent of generation and message wording.  Locations that carry a
stable name hash by name, so a finding keeps its identity when a
structural edit relocates the cell.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass

from .addressing import CellAddress


class Severity(enum.Enum):
    FAULT_INDICATOR = "fault-indicator"
    IMPERFECTION = "imperfection"


@dataclass(frozen=True)
class FindingLocation:
    """Where a finding points.  The stable name, when present, is the
    identity (it survives relocation); the address may be absent for a
    marked cell that a structural edit deleted."""

    address: CellAddress | None
    name: str | None = None

    def __post_init__(self):
        if self.address is None and self.name is None:
            raise ValueError("a location needs an address or a stable name")

    def key_part(self) -> str:
        return self.name if self.name is not None else self.address.text()


@dataclass(frozen=True)
class Finding:
    key: str
    rule_id: str
    severity: Severity
    locations: tuple[FindingLocation, ...]
    message: str
    generation: int


def finding_key(rule_id: str, locations: tuple[FindingLocation, ...] | list[FindingLocation], payload: dict) -> str:
    if not locations:
        raise ValueError("a finding needs at least one location")
    canonical = json.dumps(
        {
            "rule": rule_id,
            "locations": sorted(loc.key_part() for loc in locations),
            "payload": payload,
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def make_finding(
    rule_id: str,
    severity: Severity,
    locations: list[FindingLocation],
    message: str,
    payload: dict | None = None,
    generation: int = 0,
) -> Finding:
    payload = payload or {}
    return Finding(
        key=finding_key(rule_id, locations, payload),
        rule_id=rule_id,
        severity=severity,
        locations=tuple(locations),
        message=message,
        generation=generation,
    )


class FlagStatus(enum.Enum):
    FALSE_POSITIVE = "falsePositive"
    HOLD_OFF = "holdOff"


@dataclass(frozen=True)
class FindingFlag:
    key: str
    status: FlagStatus
    until_generation: int | None = None
    note: str = ""
    author: str = ""
    timestamp: str = ""

    def suppresses(self, generation: int) -> bool:
        if self.status is FlagStatus.FALSE_POSITIVE:
            return True
        return self.until_generation is not None and generation < self.until_generation


def apply_flags(
    raw: list[Finding],
    flags: dict[str, FindingFlag],
    generation: int,
) -> tuple[list[Finding], int]:
    """Drop flagged findings: false positives forever, hold-offs until
    their generation arrives.  Returns (visible, suppressed_count)."""
    visible: list[Finding] = []
    suppressed = 0
    for finding in raw:
        flag = flags.get(finding.key)
        if flag is not None and flag.suppresses(generation):
            suppressed += 1
        else:
            visible.append(finding)
    return visible, suppressed


@dataclass(frozen=True)
class InspectionReport:
    generation: int
    findings: tuple[Finding, ...]
    suppressed_count: int
    new_keys: frozenset[str]
    resolved_keys: frozenset[str]
    persisting_keys: frozenset[str]


def diff_reports(
    prev: InspectionReport | None,
    findings: list[Finding],
    suppressed_count: int,
    generation: int,
) -> InspectionReport:
    current = frozenset(f.key for f in findings)
    previous = frozenset() if prev is None else frozenset(f.key for f in prev.findings)
    return InspectionReport(
        generation=generation,
        findings=tuple(findings),
        suppressed_count=suppressed_count,
        new_keys=current - previous,
        resolved_keys=previous - current,
        persisting_keys=current & previous,
    )


# --- JSON views (shared by the CLI and the HTTP API) ---

def finding_to_json(finding: Finding) -> dict:
    return {
        "key": finding.key,
        "ruleId": finding.rule_id,
        "severity": finding.severity.value,
        "locations": [
            {
                **({"address": loc.address.text()} if loc.address else {}),
                **({"name": loc.name} if loc.name else {}),
            }
            for loc in finding.locations
        ],
        "message": finding.message,
        "generation": finding.generation,
    }


def report_to_json(report: InspectionReport) -> dict:
    return {
        "generation": report.generation,
        "findings": [finding_to_json(f) for f in report.findings],
        "suppressedCount": report.suppressed_count,
        "diff": {
            "new": sorted(report.new_keys),
            "resolved": sorted(report.resolved_keys),
            "persisting": sorted(report.persisting_keys),
        },
    }
