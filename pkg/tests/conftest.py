import random

import pytest

from twistsym import JetContext


@pytest.fixture
def ode():
    return JetContext(1, 1, 3)


@pytest.fixture
def ode_c():
    return JetContext(1, 1, 3, ("c",))


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
