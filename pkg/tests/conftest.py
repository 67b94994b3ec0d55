import numpy as np
import pytest

from polycont import parse_system, track

EXAMPLE_START_TEXT = "ring x, y\npoly x^2-1\npoly y^2-1\n"
EXAMPLE_TARGET_TEXT = "ring x, y\npoly x^2+(y-5)^2-16\npoly x*y\n"
EXAMPLE_START_SOLUTIONS = [(1, -1), (1, 1), (-1, 1), (-1, -1)]

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def example_start():
    return parse_system(EXAMPLE_START_TEXT)


@pytest.fixture(scope="session")
def example_target():
    return parse_system(EXAMPLE_TARGET_TEXT)


@pytest.fixture(scope="session")
def warm_jit(example_start, example_target):
    """Trigger kernel compilation once so timed checks measure tracking only."""
    track(example_start, example_target, EXAMPLE_START_SOLUTIONS, 0.6 + 0.8j)
    track(example_start, example_target, EXAMPLE_START_SOLUTIONS, 1.0)
    return True


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
