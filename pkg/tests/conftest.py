import pytest

from bianchi_heights.group import bianchi_spec, enumerate_ball


@pytest.fixture(scope="session")
def ball_d1():
    return enumerate_ball(bianchi_spec(1), T=6)


@pytest.fixture(scope="session")
def ball_d2():
    return enumerate_ball(bianchi_spec(2), T=6)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
