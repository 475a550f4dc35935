import numpy as np
import pytest

from twovc import build_one_way_model, reduce, sufficient_stats

Y22 = np.array([1.0, 2.0, 3.0, 5.0])


@pytest.fixture
def spec22():
    return build_one_way_model([2, 2], np.ones(4))


@pytest.fixture
def reduced22(spec22):
    summary = reduce(spec22)
    return summary, sufficient_stats(Y22, summary.B, summary)


@pytest.fixture
def spec123():
    return build_one_way_model([1, 2, 3], np.ones(6))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
