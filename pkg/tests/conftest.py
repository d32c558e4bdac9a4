import numpy as np
import pytest

from narrow_tuples.context import build_context
from narrow_tuples.core import ProblemContext, rebuild

FIGURE1 = (0, 2, 8, 12, 14, 18, 30)

_acceptance_lines: list[str] = []


def record_criterion(number: int, name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number:>2} {status}  {name}"
    if detail:
        line += f"  ({detail})"
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def unsieved7():
    """Every integer in [0, 40] with the full prime set (2, 3, 5, 7)."""
    return ProblemContext.from_parts(7, 40, range(41), (2, 3, 5, 7))


@pytest.fixture
def figure1(unsieved7):
    return rebuild(FIGURE1, unsieved7)


@pytest.fixture(scope="session")
def ctx7():
    return build_context(7, 30)


@pytest.fixture(scope="session")
def ctx20():
    return build_context(20)


@pytest.fixture(scope="session")
def ctx100():
    return build_context(100)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
