from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("anticyc", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("anticyc")


@pytest.fixture(scope="session")
def K7():
    from anticyc.quadfield import QuadField

    return QuadField(7)


@pytest.fixture(scope="session")
def newform33():
    from anticyc.newform import bundled_newform

    return bundled_newform("33a1")


@pytest.fixture(scope="session")
def brandt_3_11():
    from anticyc.quatgross import class_set_and_brandt

    return class_set_and_brandt(3, 11, 13)


@pytest.fixture(scope="session")
def gross_7_5(brandt_3_11, K7):
    from anticyc.quatgross import GrossPoints

    return GrossPoints(brandt_3_11, K7, 1, 5)


@pytest.fixture(scope="session")
def vector_33(brandt_3_11, newform33):
    a = {q: int(newform33.a(q)) for q in (2, 5, 7, 13)}
    return brandt_3_11.eigenvector(a)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
