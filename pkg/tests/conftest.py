import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from catschemes.fields import field_table  # noqa: E402
from catschemes.instances.finab import FinAb  # noqa: E402
from catschemes.instances.fincring import FinCRing  # noqa: E402
from catschemes.instances.finset import FinSet  # noqa: E402
from catschemes.instances.finvect import FinVect  # noqa: E402


@pytest.fixture(scope="session")
def sets():
    return FinSet(4)


@pytest.fixture(scope="session")
def groups():
    return FinAb(24)


@pytest.fixture(scope="session")
def vect2():
    return FinVect(field_table(2), 64)


@pytest.fixture(scope="session")
def vect3():
    return FinVect(field_table(3), 729)


@pytest.fixture(scope="session")
def rings():
    return FinCRing(64)


# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        verdict, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"{verdict} criterion {n}: {text}")
