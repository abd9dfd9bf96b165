import numpy as np
import pytest

from fvanish import fields


@pytest.fixture
def grid1():
    return fields.make_grid(1, 16.0, 1024)


@pytest.fixture
def grid2():
    return fields.make_grid(2, 8.0, 256)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance  # noqa: F401  (populated when the module ran)

    lines = test_acceptance.pytest_terminal_summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
