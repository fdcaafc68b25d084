import pytest

from coarselab.generators import make_cone, make_grid, make_ladder, make_tree


@pytest.fixture(scope="session")
def Z():
    return make_grid(1)


@pytest.fixture(scope="session")
def Z2():
    return make_grid(2)


@pytest.fixture(scope="session")
def T3():
    return make_tree(3)


@pytest.fixture(scope="session")
def ladder():
    return make_ladder()


@pytest.fixture(scope="session")
def cone():
    return make_cone()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
