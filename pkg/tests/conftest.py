import numpy as np
import pytest

from matstab.markov import RationalMatrixFraction
from matstab.matpoly import MatrixPolynomial as MP


def hn_2x2():
    """Self-adjoint 2x2 fraction with poles at +-1 and a common zero at 1."""
    P = MP([[[1, 0], [0, 1]], [[0, 1], [1, 0]]])
    Q = MP([[[4, -1], [-1, -1]], [[-2, 4], [-1, -2]]])
    return Q, P


def diag_cubics():
    """diag((z+6)^3, z^3+3z^2+12z+20)."""
    return MP.diag([1, 18, 108, 216], [1, 3, 12, 20])


@pytest.fixture
def ex2():
    Q, P = hn_2x2()
    return RationalMatrixFraction(Q, P)


@pytest.fixture
def ex3():
    return diag_cubics()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_poly(rng, p, n, monic=False, hermitian=False):
    c = rng.standard_normal((n + 1, p, p)) + 1j * rng.standard_normal((n + 1, p, p))
    if hermitian:
        c = 0.5 * (c + np.conj(np.swapaxes(c, -1, -2)))
    if monic:
        c[0] = np.eye(p)
    return MP(c)


# acceptance lines, filled by test_acceptance.py and echoed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
