"""Command-line entry points.

Batch inspection for CI gates and a watch mode that re-inspects the
file in the background whenever it changes on disk.

Exit codes: 0 no findings, 1 findings reported, 2 usage/format/IO
error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

from .engine import GuardianEngine
from .errors import SheetGuardError
from .findings import Finding, InspectionReport, apply_flags, diff_reports, report_to_json
from .grid import DANGLING
from .inspections import ALL_RULE_IDS, StaticRuleConfig, run_static_rules
from .scenarios import (
    ExactExpectation,
    IntervalExpectation,
    TestScenario,
    TextExpectation,
    add_scenario,
    run_all,
    run_scenario,
    scenario_findings,
    validate_scenario,
)
from .session import DocumentSession
from .storage import load_file, save_file
from .validation import evaluate_rules

_EXPECT_INTERVAL = re.compile(r"^\[(?P<lo>[^.\]]+)\.\.(?P<hi>[^\]]+)\]$")
_EXPECT_TOLERANCE = re.compile(r"^(?P<value>.+?)(?:±|\+/-)(?P<tol>[0-9.eE+-]+)$")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except SheetGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sheetguard",
        description="Run spreadsheet inspections: static rules, validation rules and test scenarios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="workbook file (.sgwb.json)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--suppressions", metavar="PATH",
                       help="standalone suppression file with extra finding flags")

    p = sub.add_parser("inspect", help="static + validation rules only")
    common(p)
    p.add_argument("--rules", help="comma-separated rule ids to enable (default: all)")
    p.set_defaults(handler=_cmd_inspect)

    p = sub.add_parser("test", help="run test scenarios")
    common(p)
    p.add_argument("--scenario", help="run one scenario by name")
    p.set_defaults(handler=_cmd_test)

    p = sub.add_parser("check", help="inspect + test combined")
    common(p)
    p.add_argument("--rules", help="comma-separated rule ids to enable (default: all)")
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("flags", help="suppression flag management")
    flags_sub = p.add_subparsers(dest="flags_command", required=True)
    pe = flags_sub.add_parser("export", help="write the workbook's flags as a suppression file")
    pe.add_argument("file")
    pe.add_argument("--out", help="target path (default: stdout)")
    pe.set_defaults(handler=_cmd_flags_export)

    p = sub.add_parser("watch", help="live mode: re-inspect on every file change")
    p.add_argument("file")
    p.add_argument("--serve", type=int, metavar="PORT", help="also expose the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="directory of UI assets to serve at /")
    p.add_argument("--once", action="store_true", help=argparse.SUPPRESS)  # test hook
    p.set_defaults(handler=_cmd_watch)

    p = sub.add_parser("scenario", help="scenario management")
    scen_sub = p.add_subparsers(dest="scenario_command", required=True)
    pa = scen_sub.add_parser("add", help="author a scenario from the terminal")
    pa.add_argument("file")
    pa.add_argument("--name", required=True)
    pa.add_argument("--input", action="append", default=[], metavar="NAME=VALUE")
    pa.add_argument("--expect", action="append", default=[],
                    metavar="NAME=VALUE[±TOL] | NAME=[LO..HI] | NAME=TEXT")
    pa.add_argument("--allow-formula-override", action="store_true")
    pa.set_defaults(handler=_cmd_scenario_add)

    p = sub.add_parser("validate", help="file format and guardian consistency check")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_validate)

    return parser


def _load_config(args) -> StaticRuleConfig:
    config = StaticRuleConfig()
    env_path = os.environ.get("SG_CONFIG")
    if env_path:
        with open(env_path, "rb") as fh:
            config = StaticRuleConfig.from_json(json.load(fh))
    rules = getattr(args, "rules", None)
    if rules:
        config = StaticRuleConfig.from_json(
            {"enabled": [r.strip() for r in rules.split(",") if r.strip()], "params": config.params}
        )
    return config


def _emit(findings: list[Finding], snapshot, args, suppressed: int = 0) -> int:
    report = diff_reports(None, findings, suppressed, snapshot.generation)
    if args.format == "json":
        print(json.dumps(report_to_json(report), indent=2))
    else:
        _print_text_report(report)
    return 1 if findings else 0


def _print_text_report(report: InspectionReport, prefix: str = "") -> None:
    # Text output is a rendering of the same report object the JSON
    # format serializes; no divergent logic.
    data = report_to_json(report)
    if not data["findings"]:
        print(f"{prefix}no findings (generation {data['generation']})")
    for f in data["findings"]:
        wheres = ", ".join(
            loc.get("address") or loc.get("name", "?") for loc in f["locations"]
        )
        print(f"{prefix}[{f['ruleId']}] {wheres}: {f['message']}")
    if data["suppressedCount"]:
        print(f"{prefix}({data['suppressedCount']} finding(s) suppressed by flags)")


def _effective_flags(args, snapshot) -> dict:
    flags = dict(snapshot.guardian.flags)
    path = getattr(args, "suppressions", None)
    if path:
        from .storage import load_suppressions

        with open(path, "rb") as fh:
            flags.update(load_suppressions(fh.read()))
    return flags


def _cmd_inspect(args) -> int:
    config = _load_config(args)
    wb = load_file(args.file)
    snapshot = wb.snapshot()
    findings = run_static_rules(snapshot, config) + evaluate_rules(snapshot)
    visible, suppressed = apply_flags(findings, _effective_flags(args, snapshot), snapshot.generation)
    return _emit(visible, snapshot, args, suppressed)


def _cmd_test(args) -> int:
    wb = load_file(args.file)
    snapshot = wb.snapshot()
    findings: list[Finding] = []
    names = [args.scenario] if args.scenario else sorted(snapshot.guardian.scenarios)
    for name in names:
        scenario = snapshot.guardian.scenarios.get(name)
        if scenario is None:
            print(f"error: no such scenario: {name}", file=sys.stderr)
            return 2
        findings.extend(scenario_findings(run_scenario(snapshot, scenario), snapshot))
    visible, suppressed = apply_flags(findings, _effective_flags(args, snapshot), snapshot.generation)
    return _emit(visible, snapshot, args, suppressed)


def _cmd_check(args) -> int:
    config = _load_config(args)
    wb = load_file(args.file)
    snapshot = wb.snapshot()
    raw = run_all(snapshot, config)
    visible, suppressed = apply_flags(raw, _effective_flags(args, snapshot), snapshot.generation)
    report = diff_reports(None, visible, suppressed, snapshot.generation)
    if args.format == "json":
        print(json.dumps(report_to_json(report), indent=2))
    else:
        _print_text_report(report)
    return 1 if report.findings else 0


def _cmd_flags_export(args) -> int:
    from .storage import export_suppressions

    wb = load_file(args.file)
    data = export_suppressions(wb)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
        print(f"wrote {len(wb.guardian.flags)} flag(s) to {args.out}")
    else:
        sys.stdout.write(data.decode("utf-8"))
    return 0


def _cmd_watch(args) -> int:
    config = _load_config(args)
    path = Path(args.file)
    session = DocumentSession(load_file(path), path=str(path), rule_config=config)
    engine = GuardianEngine(session, config=config)
    session.add_listener(engine.on_edit)

    server = None
    if args.serve is not None:
        from .server import GuardianServer

        server = GuardianServer(session, engine, host=args.host, port=args.serve,
                                static_dir=args.static)
        server.start()
        print(f"API on {server.url}", flush=True)

    engine.kick()
    last_seen = -1
    last_mtime = path.stat().st_mtime_ns
    print(f"watching {path} (Ctrl-C to stop)", flush=True)
    try:
        while True:
            report = engine.wait_for_report(last_seen, timeout=0.5)
            if report is not None:
                last_seen = report.generation
                print(f"--- report for generation {report.generation} "
                      f"({len(report.new_keys)} new, {len(report.resolved_keys)} resolved) ---")
                _print_text_report(report, prefix="  ")
                sys.stdout.flush()
            try:
                mtime = path.stat().st_mtime_ns
            except FileNotFoundError:
                mtime = last_mtime
            if mtime != last_mtime:
                last_mtime = mtime
                session.reload_from_bytes(path.read_bytes())
            if args.once and last_seen >= 0:
                break
    except KeyboardInterrupt:
        pass
    finally:
        engine.disable()
        if server is not None:
            server.stop()
    return 0


def _parse_value(text: str):
    lowered = text.lower()
    if lowered == "true":
        return True
    if lowered == "false":
        return False
    try:
        value = float(text)
    except ValueError:
        return text
    if value != value or abs(value) == float("inf"):
        return text
    return value


def _parse_expectation(spec: str):
    if "=" not in spec:
        raise SheetGuardError(f"--expect needs NAME=..., got {spec!r}")
    name, _, rest = spec.partition("=")
    m = _EXPECT_INTERVAL.match(rest)
    if m:
        return IntervalExpectation(name, float(m.group("lo")), float(m.group("hi")))
    m = _EXPECT_TOLERANCE.match(rest)
    if m:
        return ExactExpectation(name, float(m.group("value")), float(m.group("tol")))
    value = _parse_value(rest)
    if isinstance(value, float):
        return ExactExpectation(name, value)
    return TextExpectation(name, rest)


def _cmd_scenario_add(args) -> int:
    wb = load_file(args.file)
    inputs = {}
    for spec in args.input:
        if "=" not in spec:
            print(f"error: --input needs NAME=VALUE, got {spec!r}", file=sys.stderr)
            return 2
        name, _, value = spec.partition("=")
        inputs[name] = _parse_value(value)
    expectations = tuple(_parse_expectation(spec) for spec in args.expect)
    scenario = TestScenario(
        name=args.name,
        inputs=inputs,
        expectations=expectations,
        created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        allow_formula_override=args.allow_formula_override,
    )
    add_scenario(wb, scenario)
    verdict = validate_scenario(wb, scenario)
    for issue in verdict.issues:
        print(f"note: [{issue.code}] {issue.message}", file=sys.stderr)
    save_file(wb, args.file)
    print(f"scenario {args.name!r} saved to {args.file}")
    return 0


def _cmd_validate(args) -> int:
    wb = load_file(args.file)
    issues: list[str] = []
    for name, target in wb.names.items():
        if target is DANGLING:
            issues.append(f"name {name!r} dangles (its cell was deleted)")
    for name in wb.guardian.roles:
        if name not in wb.names:
            issues.append(f"role entry {name!r} has no bound name")
    for scenario in wb.guardian.scenarios.values():
        try:
            verdict = validate_scenario(wb, scenario)
        except SheetGuardError as exc:
            issues.append(f"scenario {scenario.name!r}: {exc}")
            continue
        for issue in verdict.issues:
            issues.append(f"scenario {scenario.name!r}: [{issue.code}] {issue.message}")
    for line in issues:
        print(line)
    if not issues:
        print("workbook file and guardian section are consistent")
    return 1 if issues else 0


if __name__ == "__main__":
    sys.exit(main())
