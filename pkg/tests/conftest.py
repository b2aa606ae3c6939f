from fractions import Fraction

import pytest
from hypothesis import settings

from metric_forge import ChannelMatrix, PartialScore, Space, three_word_counterexample

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=100)
settings.load_profile("repro")

ACCEPTANCE_LINES = []


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=0, help="seed for randomized tests")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def report_criterion():
    def record(number, name, passed, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} {detail}".rstrip())
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def counterexample():
    return three_word_counterexample()


def rps_values():
    """Cyclic score on {0,1,2}: f(0,1)>f(0,2), f(1,2)>f(1,0), f(2,0)>f(2,1)."""
    hi, lo = Fraction(1, 2), Fraction(1, 4)
    return {(0, 1): hi, (0, 2): lo, (1, 2): hi, (1, 0): lo, (2, 0): hi, (2, 1): lo}


@pytest.fixture
def rps_score():
    return PartialScore(Space(3, ("1", "2", "3")), rps_values())


@pytest.fixture
def rps_channel():
    rows = [[0] * 3 for _ in range(3)]
    for (x, y), v in rps_values().items():
        rows[x][y] = v
    return ChannelMatrix.from_rows(rows, "none", labels=("1", "2", "3"))
