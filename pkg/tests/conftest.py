import sys

import pytest

from openshop.shop_model import OpenShopSystem, make_state


def three_by_three():
    """Three unit-capacity machines; three jobs, each needing all of them."""
    return OpenShopSystem.build([1, 1, 1], [[0, 1, 2]] * 3)


def two_by_two():
    """Two unit-capacity machines; two jobs, each needing both."""
    return OpenShopSystem.build([1, 1], [[0, 1]] * 2)


def circular_wait():
    """Job j sits on machine j and still needs the other two."""
    return make_state([0, 1, 2], [{1, 2}, {0, 2}, {0, 1}])


def both_done_first():
    """Two-machine system with each job finished on its first machine, J1 on M1, J2 on M2."""
    return make_state([0, 1], [set(), set()])


@pytest.fixture
def sys33():
    return three_by_three()


@pytest.fixture
def sys22():
    return two_by_two()


@pytest.fixture
def blocked33():
    return circular_wait()


@pytest.fixture
def unreachable22():
    return both_done_first()


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
