import sys

import pytest
from hypothesis import HealthCheck, settings

from quadricnets.runner import load_preset

settings.register_profile("default", max_examples=120, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def xspecial():
    return load_preset("xspecial")


@pytest.fixture(scope="session")
def xsection():
    return load_preset("xsection")


@pytest.fixture(scope="session")
def xprime():
    return load_preset("xprime")


@pytest.fixture(scope="session")
def special():
    return load_preset("prop-special")


@pytest.fixture(scope="session")
def lattice_scenario():
    return load_preset("lattice-sec4")


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
