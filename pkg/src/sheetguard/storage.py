"""Workbook persistence (JSON, extension .sgwb.json) and CSV import.

The guardian section travels inside the file: a tool that knows nothing
about inspections can load, edit and re-save the sheet data while the
test rules ride along untouched.  Stripping the guardian key entirely
still yields a loadable workbook.  Saving is deterministic (sorted
keys, fixed layout), so files diff cleanly and save -> load -> save is
byte-identical.  See docs/file-format.md for the schema.
"""

from __future__ import annotations

import csv
import io
import json

from .addressing import CellAddress, RangeAddress, check_bounds, parse_address, parse_local_ref, parse_range
from .errors import CsvError, FormatError, VersionError
from .findings import FindingFlag, FlagStatus
from .grid import (
    DANGLING,
    CellContent,
    CellFormat,
    EditReceipt,
    Workbook,
)
from .guardian import CellRole
from .scenarios import (
    ExactExpectation,
    Expectation,
    IntervalExpectation,
    TestScenario,
    TextExpectation,
)
from .validation import compile_rule
from .values import BLANK, CellError, CellValue, ErrorKind

FILE_VERSION = 1
_TOP_KEYS = {"version", "sheets", "guardian"}
_SHEET_KEYS = {"name", "cells", "formats"}
_GUARDIAN_KEYS = {"names", "roles", "scenarios", "validationRules", "flags"}


# --- value encoding ---

def _value_to_json(value: CellValue):
    if value is BLANK:
        return None
    if isinstance(value, CellError):
        return {"error": value.kind.value}
    return value


def _value_from_json(data, path: str) -> CellValue:
    if data is None:
        return BLANK
    if isinstance(data, bool) or isinstance(data, str):
        return data
    if isinstance(data, (int, float)):
        return float(data)
    if isinstance(data, dict) and set(data) == {"error"}:
        for kind in ErrorKind:
            if kind.value == data["error"]:
                return CellError(kind)
    raise FormatError(path, f"not a cell value: {data!r}")


# --- save ---

def save_workbook(wb: Workbook) -> bytes:
    doc = workbook_to_doc(wb)
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def workbook_to_doc(wb: Workbook) -> dict:
    sheets = []
    for name in wb.sheet_names:
        ws = wb.sheet(name)
        cells = {}
        formats = {}
        for (col, row), content in ws.cells.items():
            ref = CellAddress(name, col, row).local_text()
            if content.is_formula:
                cells[ref] = {"f": content.source}
            elif content.is_value:
                cells[ref] = {"v": _value_to_json(content.value)}
            if not content.format.is_plain:
                fmt = {}
                if content.format.font_color is not None:
                    fmt["font"] = content.format.font_color
                if content.format.fill_color is not None:
                    fmt["fill"] = content.format.fill_color
                formats[ref] = fmt
        sheets.append({"name": name, "cells": cells, "formats": formats})

    names = {}
    for name, target in wb.names.items():
        if target is DANGLING:
            names[name] = None
        elif isinstance(target, RangeAddress):
            names[name] = target.text()
        else:
            names[name] = target.text()

    guardian = {
        "names": names,
        "roles": {name: role.value for name, role in wb.guardian.roles.items()},
        "scenarios": [scenario_to_json(s) for s in wb.guardian.scenarios.values()],
        "validationRules": [{"id": r.id, "source": r.source} for r in wb.guardian.validation_rules],
        "flags": [_flag_to_json(f) for f in wb.guardian.flags.values()],
    }
    guardian.update(wb.guardian.extra)

    return {"version": FILE_VERSION, "sheets": sheets, "guardian": guardian}


def scenario_to_json(s: TestScenario) -> dict:
    expectations = []
    for exp in s.expectations:
        if isinstance(exp, ExactExpectation):
            expectations.append(
                {"target": exp.target, "kind": "exact", "value": exp.value, "absTol": exp.abs_tol}
            )
        elif isinstance(exp, IntervalExpectation):
            expectations.append({"target": exp.target, "kind": "interval", "lo": exp.lo, "hi": exp.hi})
        else:
            expectations.append({"target": exp.target, "kind": "text", "text": exp.text})
    return {
        "name": s.name,
        "createdAt": s.created_at,
        "allowFormulaOverride": s.allow_formula_override,
        "inputs": {name: _value_to_json(v) for name, v in s.inputs.items()},
        "expectations": expectations,
    }


def _flag_to_json(flag: FindingFlag) -> dict:
    out = {
        "key": flag.key,
        "status": flag.status.value,
        "note": flag.note,
        "author": flag.author,
        "timestamp": flag.timestamp,
    }
    if flag.status is FlagStatus.HOLD_OFF:
        out["until"] = flag.until_generation
    return out


# --- load ---

def load_workbook(data: bytes) -> Workbook:
    try:
        doc = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise FormatError("$", f"not UTF-8: {exc}") from None
    except json.JSONDecodeError as exc:
        raise FormatError("$", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("$", "top level must be an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise FormatError("$", f"unknown top-level keys: {sorted(unknown)}")
    version = doc.get("version")
    if version != FILE_VERSION:
        raise VersionError(version)

    sheets = doc.get("sheets")
    if not isinstance(sheets, list) or not sheets:
        raise FormatError("sheets", "must be a nonempty list")
    names = []
    for i, sheet in enumerate(sheets):
        if not isinstance(sheet, dict):
            raise FormatError(f"sheets[{i}]", "must be an object")
        unknown = set(sheet) - _SHEET_KEYS
        if unknown:
            raise FormatError(f"sheets[{i}]", f"unknown keys: {sorted(unknown)}")
        name = sheet.get("name")
        if not isinstance(name, str) or not name:
            raise FormatError(f"sheets[{i}].name", "must be a nonempty string")
        if name in names:
            raise FormatError(f"sheets[{i}].name", f"duplicate sheet name {name!r}")
        names.append(name)

    wb = Workbook(names)
    for i, sheet in enumerate(sheets):
        ws = wb.sheet(sheet["name"])
        formats = sheet.get("formats", {})
        if not isinstance(formats, dict):
            raise FormatError(f"sheets[{i}].formats", "must be an object")
        parsed_formats: dict[tuple[int, int], CellFormat] = {}
        for ref, fmt in formats.items():
            path = f"sheets[{i}].formats.{ref}"
            try:
                col, row = parse_local_ref(ref)
            except Exception:
                raise FormatError(path, "bad cell reference") from None
            if not isinstance(fmt, dict) or set(fmt) - {"font", "fill"}:
                raise FormatError(path, "format allows only 'font' and 'fill'")
            parsed_formats[(col, row)] = CellFormat(
                font_color=fmt.get("font"), fill_color=fmt.get("fill")
            )
        cells = sheet.get("cells", {})
        if not isinstance(cells, dict):
            raise FormatError(f"sheets[{i}].cells", "must be an object")
        for ref, spec in cells.items():
            path = f"sheets[{i}].cells.{ref}"
            try:
                col, row = parse_local_ref(ref)
            except Exception:
                raise FormatError(path, "bad cell reference") from None
            fmt = parsed_formats.pop((col, row), CellFormat())
            if not isinstance(spec, dict) or not (set(spec) <= {"v", "f"}) or len(spec) != 1:
                raise FormatError(path, "cell must be {'v': scalar} or {'f': formula}")
            if "f" in spec:
                text = spec["f"]
                if not isinstance(text, str) or not text.startswith("="):
                    raise FormatError(path, "formula must be a string starting with '='")
                try:
                    content = CellContent.of_formula(text, fmt)
                except Exception as exc:
                    raise FormatError(path, f"bad formula: {exc}") from None
            else:
                value = _value_from_json(spec["v"], path)
                if value is BLANK or isinstance(value, CellError):
                    raise FormatError(path, "cell values must be numbers, text or booleans")
                try:
                    content = CellContent.of_value(value, fmt)
                except (TypeError, ValueError) as exc:
                    raise FormatError(path, str(exc)) from None
            ws.cells[(col, row)] = content
        # formats for cells with no content: formatted empty cells
        for (col, row), fmt in parsed_formats.items():
            ws.cells[(col, row)] = CellContent.empty(fmt)

    _load_guardian(wb, doc.get("guardian", {}))
    return wb


def _load_guardian(wb: Workbook, guardian) -> None:
    if not isinstance(guardian, dict):
        raise FormatError("guardian", "must be an object")
    for name, target in guardian.get("names", {}).items():
        path = f"guardian.names.{name}"
        if target is None:
            wb.names[name] = DANGLING
            continue
        if not isinstance(target, str):
            raise FormatError(path, "must be an address string or null")
        try:
            parsed = parse_range(target) if ":" in target else parse_address(target)
        except Exception as exc:
            raise FormatError(path, f"bad target: {exc}") from None
        sheet = parsed.sheet
        if not wb.has_sheet(sheet):
            raise FormatError(path, f"target sheet {sheet!r} does not exist")
        wb.names[name] = parsed

    role_values = {r.value: r for r in CellRole}
    for name, role in guardian.get("roles", {}).items():
        path = f"guardian.roles.{name}"
        if role not in role_values:
            raise FormatError(path, f"unknown role {role!r}")
        if name not in wb.names:
            raise FormatError(path, "role names an unbound stable name")
        wb.guardian.roles[name] = role_values[role]

    scenarios = guardian.get("scenarios", [])
    if not isinstance(scenarios, list):
        raise FormatError("guardian.scenarios", "must be a list")
    for i, data in enumerate(scenarios):
        name, scenario = scenario_from_json(data, f"guardian.scenarios[{i}]")
        wb.guardian.scenarios[name] = scenario

    rules = guardian.get("validationRules", [])
    if not isinstance(rules, list):
        raise FormatError("guardian.validationRules", "must be a list")
    for i, data in enumerate(rules):
        path = f"guardian.validationRules[{i}]"
        if not isinstance(data, dict) or "source" not in data:
            raise FormatError(path, "must be an object with a 'source' key")
        try:
            rule = compile_rule(data["source"])
        except Exception as exc:
            raise FormatError(path, f"bad rule source: {exc}") from None
        wb.guardian.validation_rules.append(rule)

    flags = guardian.get("flags", [])
    if not isinstance(flags, list):
        raise FormatError("guardian.flags", "must be a list")
    status_values = {s.value: s for s in FlagStatus}
    for i, data in enumerate(flags):
        path = f"guardian.flags[{i}]"
        if not isinstance(data, dict) or "key" not in data or data.get("status") not in status_values:
            raise FormatError(path, "flag needs a key and a known status")
        flag = FindingFlag(
            key=data["key"],
            status=status_values[data["status"]],
            until_generation=data.get("until"),
            note=data.get("note", ""),
            author=data.get("author", ""),
            timestamp=data.get("timestamp", ""),
        )
        wb.guardian.flags[flag.key] = flag

    for key, value in guardian.items():
        if key not in _GUARDIAN_KEYS:
            wb.guardian.extra[key] = value


def scenario_from_json(data, path: str) -> tuple[str, TestScenario]:
    if not isinstance(data, dict) or not isinstance(data.get("name"), str):
        raise FormatError(path, "scenario needs a string name")
    inputs = {}
    for name, value in data.get("inputs", {}).items():
        inputs[name] = _value_from_json(value, f"{path}.inputs.{name}")
    expectations: list[Expectation] = []
    for j, exp in enumerate(data.get("expectations", [])):
        exp_path = f"{path}.expectations[{j}]"
        if not isinstance(exp, dict) or not isinstance(exp.get("target"), str):
            raise FormatError(exp_path, "expectation needs a target name")
        kind = exp.get("kind")
        try:
            if kind == "exact":
                expectations.append(
                    ExactExpectation(exp["target"], float(exp["value"]), float(exp.get("absTol", 1e-6)))
                )
            elif kind == "interval":
                expectations.append(IntervalExpectation(exp["target"], float(exp["lo"]), float(exp["hi"])))
            elif kind == "text":
                expectations.append(TextExpectation(exp["target"], str(exp["text"])))
            else:
                raise FormatError(exp_path, f"unknown expectation kind {kind!r}")
        except FormatError:
            raise
        except Exception as exc:
            raise FormatError(exp_path, f"bad expectation: {exc}") from None
    scenario = TestScenario(
        name=data["name"],
        inputs=inputs,
        expectations=tuple(expectations),
        created_at=data.get("createdAt", ""),
        allow_formula_override=bool(data.get("allowFormulaOverride", False)),
    )
    return scenario.name, scenario


# --- standalone suppression files (CI) ---

def export_suppressions(wb: Workbook) -> bytes:
    """Flags as a standalone JSON file, for CI pipelines that keep the
    suppression baseline outside the workbook."""
    doc = {"version": FILE_VERSION, "flags": [_flag_to_json(f) for f in wb.guardian.flags.values()]}
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


def load_suppressions(data: bytes) -> dict[str, FindingFlag]:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError("$", f"not a suppression file: {exc}") from None
    if not isinstance(doc, dict) or doc.get("version") != FILE_VERSION:
        raise VersionError(doc.get("version") if isinstance(doc, dict) else None)
    status_values = {s.value: s for s in FlagStatus}
    flags: dict[str, FindingFlag] = {}
    for i, item in enumerate(doc.get("flags", [])):
        path = f"flags[{i}]"
        if not isinstance(item, dict) or "key" not in item or item.get("status") not in status_values:
            raise FormatError(path, "flag needs a key and a known status")
        flags[item["key"]] = FindingFlag(
            key=item["key"],
            status=status_values[item["status"]],
            until_generation=item.get("until"),
            note=item.get("note", ""),
            author=item.get("author", ""),
            timestamp=item.get("timestamp", ""),
        )
    return flags


# --- files ---

def load_file(path) -> Workbook:
    with open(path, "rb") as fh:
        return load_workbook(fh.read())


def save_file(wb: Workbook, path) -> None:
    data = save_workbook(wb)
    with open(path, "wb") as fh:
        fh.write(data)


# --- CSV import ---

def import_csv(
    wb: Workbook,
    sheet: str,
    anchor: CellAddress,
    data: bytes,
    delimiter: str = ",",
    numeric_detection: bool = True,
) -> EditReceipt:
    """Write CSV fields row-major from the anchor cell.

    Fields that parse as numbers become numbers (unless detection is
    off); empty fields leave the cell untouched.  One generation bump
    for the whole import.
    """
    ws = wb.sheet(sheet)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CsvError(0, f"not UTF-8: {exc}") from None
    changed: list[CellAddress] = []
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    try:
        for r, fields in enumerate(reader):
            for c, field in enumerate(fields):
                if field == "":
                    continue
                value: CellValue = field
                if numeric_detection:
                    try:
                        parsed = float(field)
                    except ValueError:
                        pass
                    else:
                        if parsed == parsed and abs(parsed) != float("inf"):
                            value = parsed
                check_bounds(anchor.col + c, anchor.row + r)
                addr = CellAddress(sheet, anchor.col + c, anchor.row + r)
                ws.cells[(addr.col, addr.row)] = CellContent.of_value(value)
                changed.append(addr)
    except csv.Error as exc:
        raise CsvError(reader.line_num, str(exc)) from None
    wb.generation += 1
    return EditReceipt(wb.generation, changed=tuple(changed))
