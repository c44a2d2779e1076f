import math

import numpy as np
import pytest

from fusiongram.frames import WeightedFamily
from fusiongram.rng import Xoshiro256

E1 = np.array([[1.0], [0.0]])
E2 = np.array([[0.0], [1.0]])
DIAG = np.array([[1.0], [1.0]]) / math.sqrt(2)


def family(*spans, weights=None):
    return WeightedFamily.from_spans(spans, weights)


def random_matrix(seed, rows, cols):
    return Xoshiro256(seed).complex_matrix(rows, cols)


@pytest.fixture
def onb_pair():
    return family(E1, E2)


@pytest.fixture
def skew_pair():
    return family(E1, DIAG)


@pytest.fixture
def three_lines():
    third = np.array([[1.0], [-1.0]]) / math.sqrt(2)
    return family(E1, E2, third)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":ab"))):
            terminalreporter.write_line(line)
