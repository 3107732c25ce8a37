import numpy as np
import pytest

from flatlp.model import LpProblem, normalize_rows

S2 = 1 / np.sqrt(2)

ACCEPTANCE = {}


def record_acceptance(number, passed, detail=""):
    ACCEPTANCE[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


def unit_square(obj=(S2, S2)):
    # x1 <= 1, x2 <= 1, -x1 <= 0, -x2 <= 0
    return LpProblem([[1, 0], [0, 1], [-1, 0], [0, -1]], [1, 1, 0, 0], obj)


def figure3(obj=(0.0, 1.0)):
    """A flattest plane (x2 <= 5) floating above a tent-shaped region.

    Rows 2 and 3 meet at the apex (0, 1); rows 4-6 close the region below.
    """
    return normalize_rows(LpProblem(
        [[0, 1], [0.6, 0.8], [-0.6, 0.8], [1, 0], [-1, 0], [0, -1]],
        [5, 0.8, 0.8, 1, 1, 0],
        obj,
    ))


FIGURE3_INTERIOR = np.array([0.0, 0.5])


def hypercube(n, obj):
    rows, rhs = [], []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        rows += [e, -e]
        rhs += [1.0, 0.0]
    return LpProblem(rows, rhs, obj)


@pytest.fixture
def square():
    return unit_square()


@pytest.fixture
def fig3():
    return figure3()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
