import itertools

import pytest

from scoop.instances import (
    SetCoverInstance,
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
    random_set_cover,
    star_graph,
)


@pytest.fixture
def p3():
    """Path i-j-k as vertices 0-1-2; edges e1=(0,1), e2=(1,2)."""
    return path_graph(3)


@pytest.fixture
def p4():
    """Path a-b-c-d; edges ab=0, bc=1, cd=2."""
    return path_graph(4)


@pytest.fixture
def c6():
    return cycle_graph(6)


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def star3():
    return star_graph(3)


@pytest.fixture
def sc3():
    """U={0,1,2}, C={{0,1},{1,2},{2}}."""
    return SetCoverInstance.from_family(3, [[0, 1], [1, 2], [2]])


@pytest.fixture
def sc5():
    """U={0..4}, C={{0,1,2},{1,3},{2,3},{3,4}}."""
    return SetCoverInstance.from_family(5, [[0, 1, 2], [1, 3], [2, 3], [3, 4]])


def all_selections(n):
    return itertools.product((0, 1), repeat=n)


def graph_corpus(count=50, sizes=(4, 5, 6, 7), seed=11):
    """Random connected graphs, cycling through ``sizes``."""
    out = []
    for k in range(count):
        n = sizes[k % len(sizes)]
        out.append(random_connected_graph(n, 0.45, seed * 1000 + k))
    return out


def setcover_corpus(count=20, seed=5):
    out = []
    for k in range(count):
        out.append(random_set_cover(3 + k % 4, 3 + k % 4, seed * 1000 + k))
    return out


#: (criterion, passed, detail) lines recorded by the acceptance suite
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
