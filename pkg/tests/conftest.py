import functools

import pytest
from hypothesis import HealthCheck, settings

from s4q.basis import enumerate_space, simple_space

settings.register_profile("s4q", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("s4q")

QS = (0.3, 0.5, 0.8)

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])


@functools.lru_cache(maxsize=None)
def spinor(L: str):
    return enumerate_space("spinor", L)


@functools.lru_cache(maxsize=None)
def scalar(L: int):
    return enumerate_space("scalar", L)


@functools.lru_cache(maxsize=None)
def simple(K: int):
    return simple_space(K)


@pytest.fixture(scope="session")
def spinor_small():
    return spinor("9/2")


@pytest.fixture(scope="session")
def spinor_big():
    return spinor("25/2")


@pytest.fixture(scope="session")
def scalar_small():
    return scalar(5)
