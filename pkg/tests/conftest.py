import random

import pytest

from cleanring import kernels
from cleanring.matring import parse_ring


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def m2f2():
    return parse_ring("M2(F2)")


@pytest.fixture(scope="session")
def m2f3():
    return parse_ring("M2(F3)")


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run a test once per available kernel backend."""
    previous = kernels.backend()
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(pytestconfig):
    return pytestconfig.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
