#!/usr/bin/env python3
"""Build the fixture workbooks committed under fixtures/.

Expected scenario values are computed right here with plain Python
arithmetic, independently of the package's evaluator, so the fixtures
double as an oracle for it.  Output is deterministic; re-running the
script must reproduce the committed files byte for byte (a test checks
that).

Fixtures:
  playground.sgwb.json                small training sheet, one seeded
                                      double-added cell and a scenario
                                      that exposes it
  tariff-comparison-pristine.sgwb.json  clean mobile-tariff comparison;
                                      every inspection quiet, all four
                                      scenarios pass
  tariff-comparison.sgwb.json         same sheet with three seeded
                                      defects: two sums each adding one
                                      value twice (K33, K34), one wrong
                                      reference (J34 reads J29), and
                                      white-on-white lookup index cells
  validation-demo.sgwb.json           two rows violating a multi-
                                      condition validation rule
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sheetguard import (
    CellContent,
    CellFormat,
    CellRole,
    ExactExpectation,
    IntervalExpectation,
    TestScenario,
    Workbook,
    add_scenario,
    mark_roles,
    parse_address,
    save_file,
    validate_scenario,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
CREATED = "2026-08-01T12:00:00Z"

WHITE = CellFormat(font_color="#FFFFFF", fill_color="#FFFFFF")

TARIFFS = [
    # name, base price, price per minute, price per text
    ("TarifA", 9.99, 0.29, 0.19),
    ("TarifB", 14.99, 0.19, 0.15),
    ("TarifC", 19.99, 0.09, 0.09),
    ("TarifD", 0.0, 0.39, 0.25),
    ("TarifE", 24.99, 0.0, 0.12),
    ("TarifF", 7.49, 0.35, 0.20),
    ("TarifG", 29.99, 0.0, 0.0),
]
FIRST_TARIFF_ROW = 28  # Calculation rows 28..34, one per tariff
BASE_MINUTES = 120.0
BASE_TEXTS = 40.0


def A(text):
    return parse_address(text)


def put(wb, ref, value, fmt=None):
    if isinstance(value, str) and value.startswith("="):
        content = CellContent.of_formula(value, fmt or CellFormat())
    else:
        content = CellContent.of_value(value, fmt or CellFormat())
    wb.set_cell(A(ref), content)


def expected_totals(minutes: float, texts: float) -> list[float]:
    """The comparison sheet's intended arithmetic, written out plainly."""
    totals = []
    for _, base, per_minute, per_text in TARIFFS:
        totals.append(base + per_minute * minutes + per_text * texts)
    return totals


def build_tariff_workbook(seeded: bool) -> Workbook:
    wb = Workbook(["Tariffs", "Calculation", "Dashboard"])

    put(wb, "Tariffs!A1", "Tariff")
    put(wb, "Tariffs!B1", "Base price")
    put(wb, "Tariffs!C1", "Per minute")
    put(wb, "Tariffs!D1", "Per text")
    for i, (name, base, per_minute, per_text) in enumerate(TARIFFS):
        row = 2 + i
        put(wb, f"Tariffs!A{row}", name)
        put(wb, f"Tariffs!B{row}", base)
        put(wb, f"Tariffs!C{row}", per_minute)
        put(wb, f"Tariffs!D{row}", per_text)

    put(wb, "Calculation!A1", "Usage profile")
    put(wb, "Calculation!A3", "Minutes:")
    put(wb, "Calculation!B3", BASE_MINUTES)
    put(wb, "Calculation!A4", "Texts:")
    put(wb, "Calculation!B4", BASE_TEXTS)

    # Column indexes for the lookups, stored in their own cells.  The
    # seeded variant paints them white on white.
    index_format = WHITE if seeded else None
    put(wb, "Calculation!H25", 2.0, index_format)
    put(wb, "Calculation!I25", 3.0, index_format)
    put(wb, "Calculation!J25", 4.0, index_format)

    for col, header in zip("GHIJK", ("Tariff", "Base", "Calls", "Texts", "Total")):
        put(wb, f"Calculation!{col}27", header)

    last_row = FIRST_TARIFF_ROW + len(TARIFFS) - 1
    for i, (name, *_rest) in enumerate(TARIFFS):
        r = FIRST_TARIFF_ROW + i
        put(wb, f"Calculation!G{r}", name)
        put(wb, f"Calculation!H{r}", f"=VLOOKUP(G{r},Tariffs!$A$2:$D$8,H$25,FALSE)")
        put(wb, f"Calculation!I{r}", f"=VLOOKUP(G{r},Tariffs!$A$2:$D$8,I$25,FALSE)*B$3")
        put(wb, f"Calculation!J{r}", f"=VLOOKUP(G{r},Tariffs!$A$2:$D$8,J$25,FALSE)*B$4")
        put(wb, f"Calculation!K{r}", f"=H{r}+I{r}+J{r}")

    if seeded:
        put(wb, "Calculation!K33", "=H33+I33+J33+J33")
        put(wb, "Calculation!K34", "=H34+I34+J34+J34")
        put(wb, "Calculation!J34", "=J29")

    put(wb, "Dashboard!A1", "Tariff comparison")
    put(wb, "Dashboard!A3", "Cheapest total:")
    put(wb, "Dashboard!B3", f"=MIN(Calculation!K{FIRST_TARIFF_ROW}:K{last_row})")

    _mark_and_plant_scenarios(wb)

    from sheetguard import compile_rule

    wb.guardian.validation_rules.append(compile_rule(
        'rule tariff-name-format scope Tariffs!A2:D8 require A starts_with "Tarif"'
    ))
    wb.generation = 0
    return wb


def _mark_and_plant_scenarios(wb: Workbook) -> None:
    in_minutes, in_texts = mark_roles(wb, [
        (A("Calculation!B3"), CellRole.INPUT),
        (A("Calculation!B4"), CellRole.INPUT),
    ])
    name_inputs = mark_roles(wb, [
        (A(f"Calculation!G{FIRST_TARIFF_ROW + i}"), CellRole.INPUT) for i in range(len(TARIFFS))
    ])
    index_inputs = mark_roles(wb, [
        (A("Calculation!H25"), CellRole.INPUT),
        (A("Calculation!I25"), CellRole.INPUT),
        (A("Calculation!J25"), CellRole.INPUT),
    ])
    table_markings = []
    for i in range(len(TARIFFS)):
        for col in "ABCD":
            table_markings.append((A(f"Tariffs!{col}{2 + i}"), CellRole.INPUT))
    table_inputs = mark_roles(wb, table_markings)

    mark_roles(wb, [
        (A(f"Calculation!H{FIRST_TARIFF_ROW}"), CellRole.INTERMEDIATE),
        (A(f"Calculation!I{FIRST_TARIFF_ROW}"), CellRole.INTERMEDIATE),
        (A(f"Calculation!J{FIRST_TARIFF_ROW}"), CellRole.INTERMEDIATE),
    ])
    total_outputs = mark_roles(wb, [
        (A(f"Calculation!K{FIRST_TARIFF_ROW + i}"), CellRole.OUTPUT) for i in range(len(TARIFFS))
    ])
    (cheapest_output,) = mark_roles(wb, [(A("Dashboard!B3"), CellRole.OUTPUT)])

    def pinned_inputs(minutes: float, texts: float) -> dict:
        inputs = {in_minutes: minutes, in_texts: texts}
        for i, (name, base, per_minute, per_text) in enumerate(TARIFFS):
            inputs[name_inputs[i]] = name
            inputs[table_inputs[i * 4 + 0]] = name
            inputs[table_inputs[i * 4 + 1]] = base
            inputs[table_inputs[i * 4 + 2]] = per_minute
            inputs[table_inputs[i * 4 + 3]] = per_text
        inputs[index_inputs[0]] = 2.0
        inputs[index_inputs[1]] = 3.0
        inputs[index_inputs[2]] = 4.0
        return inputs

    def exact_scenario(name: str, minutes: float, texts: float) -> TestScenario:
        totals = expected_totals(minutes, texts)
        expectations = [
            ExactExpectation(total_outputs[i], totals[i]) for i in range(len(TARIFFS))
        ]
        expectations.append(ExactExpectation(cheapest_output, min(totals)))
        return TestScenario(
            name=name,
            inputs=pinned_inputs(minutes, texts),
            expectations=tuple(expectations),
            created_at=CREATED,
        )

    add_scenario(wb, exact_scenario("regression-baseline", BASE_MINUTES, BASE_TEXTS))
    add_scenario(wb, exact_scenario("zero-consumption", 0.0, 0.0))
    add_scenario(wb, exact_scenario("heavy-texting", 30.0, 400.0))

    totals = expected_totals(BASE_MINUTES, BASE_TEXTS)
    interval_expectations = [
        IntervalExpectation(total_outputs[i], totals[i] - 5.0, totals[i] + 5.0)
        for i in range(len(TARIFFS))
    ]
    interval_expectations.append(
        IntervalExpectation(cheapest_output, min(totals) - 5.0, min(totals) + 5.0)
    )
    add_scenario(wb, TestScenario(
        name="interval-check",
        inputs=pinned_inputs(BASE_MINUTES, BASE_TEXTS),
        expectations=tuple(interval_expectations),
        created_at=CREATED,
    ))


def build_playground() -> Workbook:
    wb = Workbook(["Calc"])
    put(wb, "Calc!A1", "Training sheet")
    addends = list(range(1, 8))  # B2..B8 hold 1..7
    for i, value in enumerate(addends):
        put(wb, f"Calc!B{2 + i}", float(value))
    # The seeded fault: the third addend is summed twice.
    put(wb, "Calc!C1", "=B2+B3+B4+B4+B5+B6+B7+B8")

    input_names = mark_roles(wb, [(A(f"Calc!B{2 + i}"), CellRole.INPUT) for i in range(7)])
    (output_name,) = mark_roles(wb, [(A("Calc!C1"), CellRole.OUTPUT)])
    add_scenario(wb, TestScenario(
        name="first-run",
        inputs={name: float(i + 1) for i, name in enumerate(input_names)},
        expectations=(ExactExpectation(output_name, float(sum(addends))),),
        created_at=CREATED,
    ))
    wb.generation = 0
    return wb


def build_validation_demo() -> Workbook:
    wb = Workbook(["Data"])
    put(wb, "Data!A1", "Code")
    put(wb, "Data!C1", "Registry number")
    put(wb, "Data!A2", "foo-one")
    put(wb, "Data!C2", "1234567890bar")
    put(wb, "Data!A3", "foo-two")
    put(wb, "Data!C3", "123bar")            # too few digits
    put(wb, "Data!A4", "else")
    put(wb, "Data!C4", "anything goes")     # guard fails, never checked
    put(wb, "Data!A5", "foo-three")
    put(wb, "Data!C5", "12345bar")          # too few digits

    from sheetguard import compile_rule

    wb.guardian.validation_rules.append(compile_rule(
        'rule foo-bar-code scope Data!A2:C10 when A starts_with "foo" '
        'require C shape digits(10) "bar"'
    ))
    wb.generation = 0
    return wb


def main() -> int:
    FIXTURES.mkdir(exist_ok=True)
    builds = {
        "playground.sgwb.json": build_playground,
        "tariff-comparison-pristine.sgwb.json": lambda: build_tariff_workbook(seeded=False),
        "tariff-comparison.sgwb.json": lambda: build_tariff_workbook(seeded=True),
        "validation-demo.sgwb.json": build_validation_demo,
    }
    for filename, build in builds.items():
        wb = build()
        for scenario in wb.guardian.scenarios.values():
            verdict = validate_scenario(wb, scenario)
            status = "ok" if verdict.ok else "INCOMPLETE"
            print(f"{filename}: scenario {scenario.name!r} specification {status}")
            for issue in verdict.issues:
                print(f"  - [{issue.code}] {issue.message}")
        save_file(wb, FIXTURES / filename)
        print(f"wrote {FIXTURES / filename}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
