from pathlib import Path

import pytest
from hypothesis import settings

from qbfchannel.qbf import QbfFormula

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

DATA = Path(__file__).parent / "data"


@pytest.fixture
def q1():
    """∃x1∀x2 (x1∨x2)(x1∨¬x2): true, x1 := true wins."""
    return QbfFormula.from_prefix("ea", [[1, 2], [1, -2]])


@pytest.fixture
def q2():
    """∃x1∀x2 (x1∨x2)(¬x1∨x2): false."""
    return QbfFormula.from_prefix("ea", [[1, 2], [-1, 2]])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
