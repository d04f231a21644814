import numpy as np
import pytest

from avalanche_dg import Mesh, PhysicalParams


@pytest.fixture
def params():
    return PhysicalParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def mesh():
    return Mesh(30.0, 256)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
