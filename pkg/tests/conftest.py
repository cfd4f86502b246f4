import numpy as np
import pytest

from spikelab.discretization import build_grid
from spikelab.ground_state import profile_moments, solve_ground_state
from spikelab.problem import Box, Constant, GaussianBumps, ProblemData, QuadraticWell

# lines recorded by test_acceptance, echoed at the end of every run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def base2():
    return solve_ground_state(2, 3.0)


@pytest.fixture(scope="session")
def c0_2(base2):
    return profile_moments(base2).c0_bar


@pytest.fixture(scope="session")
def well():
    """N=2, p=3, unit box, J=1, V=1+|x-(0.5,0.5)|^2."""
    return ProblemData(2, 3.0, Constant(1.0), QuadraticWell((0.5, 0.5)), Box((0, 0), (1, 1)))


@pytest.fixture(scope="session")
def flat():
    return ProblemData(2, 3.0, Constant(1.0), Constant(1.0), Box((0, 0), (1, 1)))


@pytest.fixture(scope="session")
def two_well():
    V = GaussianBumps(1.5, [-0.8, -0.8], [[0.6, 0.5], [1.4, 0.5]], [0.2, 0.2])
    return ProblemData(2, 3.0, Constant(1.0), V, Box((0, 0), (2, 1)))


@pytest.fixture(scope="session")
def grid129():
    return build_grid(Box((0, 0), (1, 1)), 129)


@pytest.fixture(scope="session")
def grid65():
    return build_grid(Box((0, 0), (1, 1)), 65)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
