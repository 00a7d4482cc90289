import pytest
from hypothesis import settings

from confalg import make_algebra

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def conf2d():
    return make_algebra("conf2d")


@pytest.fixture(scope="session")
def pair():
    return make_algebra("conf2d-pair")


@pytest.fixture(scope="session")
def poincare():
    return make_algebra("poincare4d")


@pytest.fixture(scope="session")
def conf4d():
    return make_algebra("conf4d")


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Lines collected by the acceptance tests, echoed in the terminal summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
