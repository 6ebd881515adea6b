from __future__ import annotations

import cmath
import math

import pytest

from hardylip.conformal import SchwarzChristoffelMap, sc_solve
from hardylip.geometry import LipschitzGraph


@pytest.fixture(scope="session")
def flat():
    return LipschitzGraph.flat()


@pytest.fixture(scope="session")
def wedge():
    return LipschitzGraph.wedge(1.0)


@pytest.fixture(scope="session")
def zigzag():
    # slopes +1, -1, +1 between two interior kinks
    return LipschitzGraph.zigzag([(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)], 1.0, 1.0)


@pytest.fixture(scope="session")
def zigzag5():
    return LipschitzGraph.zigzag([(-1.5, 0.0), (-0.5, 0.5), (0.5, -0.25), (1.5, 0.25), (2.5, 0.0)], 0.0, -0.25)


@pytest.fixture(scope="session")
def wedge_map():
    """Closed-form map e^{i pi/4} z^{1/2} onto the region above |u|."""
    return SchwarzChristoffelMap(math.pi / 4, (0.0,), (-0.5,), 1j, 1j, 0.5)


@pytest.fixture(scope="session")
def solved_wedge(wedge):
    return sc_solve(wedge)


def wedge_closed_form(z):
    return cmath.exp(1j * math.pi / 4) * cmath.sqrt(z)


ACCEPTANCE: dict[int, str] = {}


def record_acceptance(n: int, ok: bool, detail: str, seconds: float | None = None) -> None:
    took = "" if seconds is None else f" ({seconds:.1f}s)"
    line = f"AC{n:02d} {'PASS' if ok else 'FAIL'}: {detail}{took}"
    ACCEPTANCE[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
