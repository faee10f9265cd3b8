from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from restricted_santa.model import Approximation, make_instance

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def eps1():
    return Approximation(Fraction(1))


@pytest.fixture
def inst_a():
    # p1:{r1}, p2:{r1,r2,r3}; values 10, 6, 5
    return make_instance([10, 6, 5], [{0}, {0, 1, 2}])


@pytest.fixture
def inst_b():
    # two players, one resource both want
    return make_instance([10], [{0}, {0}])


@pytest.fixture
def inst_c():
    return make_instance([3, 4], [{0, 1}])


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
