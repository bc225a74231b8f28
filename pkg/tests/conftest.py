import pytest

from rwepidemic.rrg import from_edges, generate_regular


def _k(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@pytest.fixture
def k4():
    return from_edges(4, 3, _k(4))


@pytest.fixture
def k33():
    return from_edges(6, 3, [(i, j) for i in range(3) for j in range(3, 6)])


@pytest.fixture
def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return from_edges(10, 3, outer + inner + spokes)


@pytest.fixture(scope="session")
def g500():
    return generate_regular(500, 3, 7)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
