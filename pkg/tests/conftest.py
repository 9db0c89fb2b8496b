import numpy as np
import pytest

from admmcert import PolyhedralSet, QuadraticFunction, SplitProblem


def make_p1():
    # f = (x-1)^2, g = (y-2)^2, x - y = 0
    return SplitProblem(
        f=QuadraticFunction([[2.0]], [-2.0], 1.0),
        g=QuadraticFunction([[2.0]], [-4.0], 4.0),
        A=[[1.0]],
        B=[[-1.0]],
        c=[0.0],
    )


def make_p2():
    p1 = make_p1()
    return SplitProblem(p1.f, p1.g, p1.A, p1.B, p1.c, X=PolyhedralSet(1, G=[[1.0]], h=[1.0]))


@pytest.fixture
def p1():
    return make_p1()


@pytest.fixture
def p2():
    return make_p2()


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


# one "PASS/FAIL criterion ..." line per acceptance criterion, shown after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
