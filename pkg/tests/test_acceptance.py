"""Acceptance suite: one test per release criterion, one printed verdict
line each.  Tolerances are pinned here and nowhere else."""

import json
import random
import time

import pytest

from sheetguard import (
    BLANK,
    CellContent,
    DANGLING,
    DocumentSession,
    EditKind,
    FakeClock,
    FindingFlag,
    FlagStatus,
    GuardianEngine,
    SimulatedWorker,
    StructuralEdit,
    Workbook,
    load_file,
    load_workbook,
    parse_address,
    recalculate,
    run_cycle,
    run_scenario,
    save_workbook,
    validate_scenario,
)
from sheetguard.cli import main as cli_main
from sheetguard.formula import evaluate, parse
from sheetguard.inspections import REPEATED_REF, run_static_rules
from sheetguard.values import DIV0

from conftest import build_workbook
from test_calc import naive_fixpoint, random_dag_workbook
from test_formula_eval import random_expr
from test_scenarios import brute_force_missing_inputs, random_scenario_workbook


def verdict(criterion: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"{status} {criterion}" + (f": {detail}" if detail else ""))
    assert ok, f"{criterion}: {detail}"


def A(text):
    return parse_address(text)


def test_p1_repeated_reference_detection(playground_path):
    wb = load_file(playground_path)
    snapshot = wb.snapshot()
    started = time.perf_counter()
    findings = [f for f in run_static_rules(snapshot) if f.rule_id == REPEATED_REF]
    elapsed = time.perf_counter() - started
    ok = (
        len(findings) == 1
        and findings[0].locations[0].address == A("Calc!C1")
        and "Calc!B4" in findings[0].message
        and elapsed < 1.0
    )
    verdict("P1 repeated-reference detection",
            ok, f"1 finding naming B4 in {elapsed * 1000:.1f} ms")


def test_p2_seeded_fault_fixture_parity(tariff_path, capsys):
    exit_code = cli_main(["check", str(tariff_path), "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    with capsys.disabled():
        by_rule = {}
        for f in report["findings"]:
            by_rule.setdefault(f["ruleId"], set()).add(f["locations"][0].get("address"))
        r1 = by_rule.get("SG-R1-repeated-ref", set())
        wrong_ref = by_rule.get("SG-R6-neighbor-inconsistency", set()) | by_rule.get(
            "SG-R2-empty-ref", set()
        )
        hidden = by_rule.get("SG-R5-hidden-content", set())
        scenario_failures = by_rule.get("SG-T1-scenario", set())
        ok = (
            exit_code == 1
            and r1 == {"Calculation!K33", "Calculation!K34"}
            and "Calculation!J34" in wrong_ref
            and hidden == {"Calculation!H25", "Calculation!I25", "Calculation!J25"}
            and len(scenario_failures) >= 1
        )
        verdict("P2 seeded-fault fixture parity", ok,
                f"exit {exit_code}; R1 at {sorted(r1)}; hidden at {len(hidden)} cells; "
                f"{len(scenario_failures)} scenario locations failing")


def scenario_verdicts(wb):
    snapshot = wb.snapshot()
    out = {}
    for name, scenario in snapshot.guardian.scenarios.items():
        result = run_scenario(snapshot, scenario)
        out[name] = tuple((r.target, r.state) for r in result.results)
    return out


def test_p3_maintenance_trap_and_relocation(tariff_pristine_path):
    wb = load_file(tariff_pristine_path)
    before = scenario_verdicts(wb)
    all_pass_before = all(s == "pass" for states in before.values() for _, s in states)

    # The trap: a new column inside the lookup table. Literal references
    # shift, but the values stored in the index cells do not.
    wb.apply_structural_edit(StructuralEdit(EditKind.INSERT_COLS, "Tariffs", 2, 1))
    after = scenario_verdicts(wb)
    flipped = [
        name for name in before
        if before[name] != after[name]
        and any(s == "pass" for _, s in before[name])
        and any(s != "pass" for _, s in after[name])
    ]
    names_resolve = all(wb.resolve_name(n) is not DANGLING for n in wb.names)

    # The relocation claim: inserting rows above the outputs moves
    # everything coherently, so verdicts must not change.
    wb2 = load_file(tariff_pristine_path)
    wb2.apply_structural_edit(StructuralEdit(EditKind.INSERT_ROWS, "Calculation", 1, 2))
    unchanged = scenario_verdicts(wb2) == before
    names_resolve2 = all(wb2.resolve_name(n) is not DANGLING for n in wb2.names)

    ok = all_pass_before and len(flipped) >= 1 and names_resolve and unchanged and names_resolve2
    verdict("P3 maintenance trap vs relocation", ok,
            f"{len(flipped)} scenario(s) flipped by the table column insert; "
            f"row insert left verdicts unchanged={unchanged}")


def test_p4_validation_matches_brute_force_oracle():
    rng = random.Random(20260810)
    mismatches = 0
    for _ in range(50):
        wb, scenario = random_scenario_workbook(rng)
        snapshot = wb.snapshot()
        reported = set()
        for issue in validate_scenario(wb, scenario).issues:
            if issue.code == "missing-input":
                reported = set(issue.subjects)
        if reported != brute_force_missing_inputs(snapshot, scenario):
            mismatches += 1
    verdict("P4 missing-input oracle", mismatches == 0,
            f"{mismatches} mismatches over 50 random workbooks")


def test_p5_evaluator_oracles():
    rng = random.Random(5)
    bad_formulas = 0
    for _ in range(1000):
        text, expected = random_expr(rng, rng.randint(1, 4))
        actual = evaluate(parse("=" + text), lambda a: BLANK, "S")
        if expected is None:
            if actual != DIV0:
                bad_formulas += 1
        elif not isinstance(actual, float) or abs(actual - expected) > 1e-12 * max(1.0, abs(expected)):
            bad_formulas += 1

    bad_workbooks = 0
    for _ in range(100):
        wb = random_dag_workbook(rng)
        snapshot = wb.snapshot()
        if recalculate(snapshot).values != naive_fixpoint(snapshot):
            bad_workbooks += 1
    ok = bad_formulas == 0 and bad_workbooks == 0
    verdict("P5 evaluator oracles", ok,
            f"{bad_formulas}/1000 formula disagreements, {bad_workbooks}/100 fixpoint disagreements")


def test_p6_flag_persistence(playground_path, tmp_path):
    wb = load_file(playground_path)
    report = run_cycle(wb.snapshot())
    target = next(f for f in report.findings if f.rule_id == REPEATED_REF)
    wb.guardian.flags[target.key] = FindingFlag(
        target.key, FlagStatus.FALSE_POSITIVE, note="intended duplicate", author="acceptance",
    )
    saved = tmp_path / "flagged.sgwb.json"
    saved.write_bytes(save_workbook(wb))

    reloaded = load_workbook(saved.read_bytes())
    report2 = run_cycle(reloaded.snapshot())
    ok = (
        target.key not in {f.key for f in report2.findings}
        and report2.suppressed_count == 1
    )
    verdict("P6 flag persistence", ok,
            f"finding absent after reload, suppressed_count={report2.suppressed_count}")


def _p7_run(seed: int):
    wb = build_workbook({"Calc": {"B2": 1.0, "B3": 2.0, "C1": "=B2+B3+B3"}})
    session = DocumentSession(wb)
    clock = FakeClock()
    rng = random.Random(seed)
    delays = [rng.choice([0.01, 0.05, 0.2, 0.8, 1.5]) for _ in range(200)]
    engine = GuardianEngine(session, clock=clock,
                            worker=SimulatedWorker(clock, delays), debounce=0.3)
    session.add_listener(engine.on_edit)

    published = []
    seen = -1

    def observe():
        nonlocal seen
        report = engine.current_report()
        if report is not None and report.generation > seen:
            seen = report.generation
            published.append(report.generation)

    for i in range(100):
        session.set_cell(A("Calc!B2"), CellContent.of_value(float(i)))
        clock.advance(rng.choice([0.02, 0.1, 0.35, 0.6]))
        observe()
    final_edit_gen = session.generation
    clock.advance(60.0)
    observe()
    return published, final_edit_gen


def test_p7_live_mode_monotonicity():
    runs = [_p7_run(seed=99) for _ in range(10)]
    published, final_gen = runs[0]
    strictly_increasing = published == sorted(set(published))
    converged = bool(published) and published[-1] >= final_gen
    deterministic = all(r == runs[0] for r in runs)
    ok = strictly_increasing and converged and deterministic
    verdict("P7 live-mode monotonicity", ok,
            f"{len(published)} reports published, last={published[-1] if published else None} "
            f">= final edit {final_gen}; identical across 10 runs={deterministic}")


def test_p8_data_validation_breadth(validation_demo_path):
    wb = load_file(validation_demo_path)
    first = [f for f in run_cycle(wb.snapshot()).findings if f.rule_id == "SG-V1-validation"]
    # edit an unrelated cell: the checker must NOT forget the other row
    wb.set_cell(A("Data!A9"), CellContent.of_value("untouched"))
    second = [f for f in run_cycle(wb.snapshot()).findings if f.rule_id == "SG-V1-validation"]
    rows_first = sorted(f.locations[0].address.row for f in first)
    rows_second = sorted(f.locations[0].address.row for f in second)
    ok = rows_first == rows_second == [3, 5]
    verdict("P8 validation breadth", ok,
            f"violating rows {rows_first} reported on run 1 and {rows_second} on run 2")


def _random_persistable_workbook(rng):
    wb = Workbook(["Main", "Aux"])
    for sheet in wb.sheet_names:
        for _ in range(rng.randint(0, 10)):
            col, row = rng.randint(1, 9), rng.randint(1, 9)
            choice = rng.random()
            if choice < 0.5:
                content = CellContent.of_value(round(rng.uniform(-1e4, 1e4), 4))
            elif choice < 0.8:
                content = CellContent.of_value(rng.choice(["alpha", "Tarif", "x y z", ""]))
            else:
                content = CellContent.of_formula("=SUM(A1:B3)*2")
            wb.sheet(sheet).cells[(col, row)] = content
    if rng.random() < 0.5:
        from sheetguard import CellRole

        wb.bind_name("sg_in_1", A("Main!A1"))
        wb.guardian.roles["sg_in_1"] = CellRole.INPUT
    return wb


def test_p9_round_trip():
    rng = random.Random(9)
    bad = 0
    for _ in range(200):
        wb = _random_persistable_workbook(rng)
        data = save_workbook(wb)
        back = load_workbook(data)
        if not back.content_equals(wb) or save_workbook(back) != data:
            bad += 1
    verdict("P9 file round-trip", bad == 0, f"{bad}/200 round-trip failures")
