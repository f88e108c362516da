import sys
from pathlib import Path

import pytest

from sheetguard import CellContent, Workbook, parse_address

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def build_workbook(sheets: dict) -> Workbook:
    """Terse workbook builder for tests.

    ``sheets`` maps sheet name -> {"B2": 12, "C1": "=B2+1", ...}.
    Strings starting with "=" become formulas, everything else a value.
    """
    wb = Workbook(list(sheets))
    for sheet_name, cells in sheets.items():
        for ref, content in cells.items():
            addr = parse_address(ref, default_sheet=sheet_name)
            if isinstance(content, str) and content.startswith("="):
                wb.set_cell(addr, CellContent.of_formula(content))
            else:
                wb.set_cell(addr, CellContent.of_value(content))
    return wb


@pytest.fixture
def addr():
    return parse_address


def fixture_path(name: str) -> Path:
    path = FIXTURES / name
    if not path.exists():
        pytest.skip(f"fixture {name} not built yet (run scripts/build_fixtures.py)")
    return path


@pytest.fixture
def playground_path():
    return fixture_path("playground.sgwb.json")


@pytest.fixture
def tariff_path():
    return fixture_path("tariff-comparison.sgwb.json")


@pytest.fixture
def tariff_pristine_path():
    return fixture_path("tariff-comparison-pristine.sgwb.json")


@pytest.fixture
def validation_demo_path():
    return fixture_path("validation-demo.sgwb.json")
