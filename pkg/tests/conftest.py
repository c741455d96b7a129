import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from scatter1d.potential import default_grid, dirac, poschl_teller, zero
from scatter1d.transform import build_basis

settings.register_profile(
    "repo", max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(scope="session")
def pt():
    return poschl_teller(6.0)


@pytest.fixture(scope="session")
def pt_basis(pt, grid):
    return build_basis(pt, grid=grid)


@pytest.fixture(scope="session")
def zero_basis(grid):
    return build_basis(zero(), grid=grid)


@pytest.fixture(scope="session")
def delta_basis(grid):
    return build_basis(dirac(-1.0), grid=grid)


def l2(grid, u):
    return float(np.sqrt(np.dot(grid.weights, np.abs(u) ** 2)))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
