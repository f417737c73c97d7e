import pytest

from sturmlab.exact import Mat2
from sturmlab.sturm import new_seq
from sturmlab.words import SeqSpec

# filled by tests/test_acceptance.py, printed after the run
CRITERIA = {}


def bl_seq():
    """w0 = Phi(2), w1 = Phi(1), s = (1, 1, ...)."""
    return new_seq(Mat2(2, 1, 1, 0), Mat2(1, 1, 1, 0), SeqSpec.constant(1))


def sigma2_seq():
    """w0 = Phi(2), w1 = Phi(2)Phi(1), s = (2, 2, ...)."""
    return new_seq(Mat2(2, 1, 1, 0), Mat2(3, 2, 1, 1), SeqSpec.constant(2))


def det_seq():
    """A seed with |det w_k| growing, so delta > 0."""
    return new_seq(Mat2(3, 1, 1, 1), Mat2(1, 1, 1, 2), SeqSpec.constant(1))


@pytest.fixture(scope="session")
def bl():
    return bl_seq()


@pytest.fixture(scope="session")
def sigma2():
    return sigma2_seq()


@pytest.fixture(scope="session")
def det_growth():
    return det_seq()


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[number])
