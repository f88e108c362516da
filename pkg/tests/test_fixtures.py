"""The committed fixtures must match what the builder script produces
(deterministic save guards against silent drift) and stay inspectable."""

import importlib.util
import sys

import pytest

from sheetguard import load_file, run_cycle, save_workbook
from conftest import FIXTURES, SCRIPTS


def load_builder():
    spec = importlib.util.spec_from_file_location("build_fixtures", SCRIPTS / "build_fixtures.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def test_builder_reproduces_committed_fixtures():
    builder = load_builder()
    expected = {
        "playground.sgwb.json": builder.build_playground,
        "tariff-comparison-pristine.sgwb.json": lambda: builder.build_tariff_workbook(seeded=False),
        "tariff-comparison.sgwb.json": lambda: builder.build_tariff_workbook(seeded=True),
        "validation-demo.sgwb.json": builder.build_validation_demo,
    }
    for filename, build in expected.items():
        committed = (FIXTURES / filename).read_bytes()
        assert save_workbook(build()) == committed, f"{filename} drifted from its builder"


def test_pristine_fixture_has_zero_findings(tariff_pristine_path):
    report = run_cycle(load_file(tariff_pristine_path).snapshot())
    assert report.findings == ()


def test_all_fixtures_load_and_scenarios_validate(tariff_path, playground_path,
                                                  tariff_pristine_path, validation_demo_path):
    from sheetguard import validate_scenario

    for path in (tariff_path, playground_path, tariff_pristine_path, validation_demo_path):
        wb = load_file(path)
        for scenario in wb.guardian.scenarios.values():
            assert validate_scenario(wb, scenario).ok, (path, scenario.name)


def scenario_verdict_map(wb):
    from sheetguard import run_scenario

    snapshot = wb.snapshot()
    return {
        name: tuple((r.target, r.state) for r in run_scenario(snapshot, s).results)
        for name, s in snapshot.guardian.scenarios.items()
    }


@pytest.mark.parametrize("edit", [
    # Row/column insertions anywhere that delete nothing must leave every
    # scenario verdict untouched: names relocate, literal references
    # shift, both stay coherent. Only a value-encoded index read through
    # a lookup (the Tariffs-table column case in the acceptance suite)
    # may break this, which is precisely the trap the engine must catch.
    ("insert_rows", "Calculation", 1, 2),
    ("insert_rows", "Calculation", 26, 1),   # between the index cells and the block
    ("insert_rows", "Calculation", 30, 3),   # inside the per-tariff block
    ("insert_cols", "Calculation", 1, 1),
    ("insert_cols", "Calculation", 8, 2),    # splits the formula block at column H
    ("insert_rows", "Tariffs", 1, 1),        # above the lookup table
    ("insert_rows", "Tariffs", 5, 1),        # inside the lookup table
    ("insert_rows", "Dashboard", 2, 4),
])
def test_scenarios_survive_structural_edits(tariff_pristine_path, edit):
    from sheetguard import DANGLING, EditKind, StructuralEdit

    kind, sheet, at, count = edit
    wb = load_file(tariff_pristine_path)
    before = scenario_verdict_map(wb)
    assert all(state == "pass" for states in before.values() for _, state in states)
    wb.apply_structural_edit(StructuralEdit(EditKind(kind), sheet, at, count))
    assert scenario_verdict_map(wb) == before
    assert all(wb.resolve_name(n) is not DANGLING for n in wb.names)
