import time

import pytest

from diracbound import bundle

_START = time.perf_counter()
ACCEPTANCE_LINES = []


def session_elapsed() -> float:
    return time.perf_counter() - _START


def pytest_collection_modifyitems(config, items):
    # the acceptance module runs last so that its wall-clock criterion sees the whole suite
    items.sort(key=lambda item: item.module.__name__.endswith("test_acceptance"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def unit_disk():
    return bundle("disk", radius=1.0)


@pytest.fixture(scope="session")
def unit_sphere():
    return bundle("sphere", radius=1.0)


@pytest.fixture(scope="session")
def unit_torus():
    return bundle("torus", L1=1.0, L2=1.0)
