import sys
from pathlib import Path

import pytest

from nestedif.workbook import load_cell_list

FIXTURES = Path(__file__).parent / "fixtures"

FIG1_FORMULA = (
    '=IF(B10="Rev", B14*B15/B16, IF(B10="Units", B14*B17/B18, IF(B10="MH", B14*B19/B20, '
    'IF(B10="MC", B14*B21/B22, IF(B11="", "", "not correct Alloc.")))))'
)
ORIGINAL_ALLOCATION_FORMULA = (
    '=IF($D14="Rev", $C14*$E$11/$C$11, IF($D14="Units", $C14*$E$9/$C$9, IF($D14="MH", '
    '$C14*$E$12/$C$12, IF($D14="MC", $C14*$E$13/$C$13, IF($C14="", "", "not correct Allocation")))))'
)
BRANCH_ON_TRUE_FORMULA = '=IF(A3>A4, IF(A3>A5, "yes", "first"), "no")'
COMPLEX_FORMULA = "=IF(T1, IF(T2,1,2), IF(T3,3,4))"


def load_fixture(name):
    return load_cell_list((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def fig1():
    return load_fixture("fig1.cells")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[number])
