from fractions import Fraction

import pytest
from hypothesis import settings

from subiso import Digraph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def arcs(n, pairs):
    return Digraph.from_arcs(n, pairs)


@pytest.fixture
def c3():
    return arcs(3, [(1, 2), (2, 3), (3, 1)])


@pytest.fixture
def c4():
    return arcs(4, [(1, 2), (2, 3), (3, 4), (4, 1)])


@pytest.fixture
def half():
    return Fraction(1, 2)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[k])
