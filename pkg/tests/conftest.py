import pytest

from graphshadow import Q, TautCover
from graphshadow.systems import circle_graph, interval_graph, tent, y_tree

# acceptance summary lines, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def unit():
    return interval_graph()


@pytest.fixture
def circle():
    return circle_graph()


@pytest.fixture
def ytree():
    return y_tree()


@pytest.fixture
def tent_map(unit):
    return tent(unit)[1]


def three_cover(g):
    """{[0, 0.4), (0.3, 0.7), (0.6, 1]} on the unit interval."""
    return TautCover(
        g,
        [
            g.interval(0, 0, Q("2/5"), True, False),
            g.interval(0, Q("3/10"), Q("7/10")),
            g.interval(0, Q("3/5"), 1, False, True),
        ],
    )


@pytest.fixture
def cover3(unit):
    return three_cover(unit)
