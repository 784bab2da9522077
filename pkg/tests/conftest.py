import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qharmonic import PhaseGrid, Region, build_symbol, gaussian_window  # noqa: E402

INF = math.inf
PROJECTOR = {"kind": "gaussian", "amplitude": 2.0, "width": 2**-0.5}


@pytest.fixture(scope="session")
def grid():
    return PhaseGrid(256, 8.0)


@pytest.fixture(scope="session")
def grid128():
    return PhaseGrid(128, 8.0)


@pytest.fixture(scope="session")
def small():
    return PhaseGrid(64, 4.0)


@pytest.fixture(scope="session")
def disc2():
    return Region.disc(2.0)


@pytest.fixture
def phi0(grid):
    return gaussian_window(grid)


@pytest.fixture(scope="session")
def projector_symbol(grid):
    return build_symbol(grid, PROJECTOR)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: int(k[1:])):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"{key:>3} {'PASS' if ok else 'FAIL'}  {detail}")
