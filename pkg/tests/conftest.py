import numpy as np
import pytest

from eigenlink.graph import Graph

ACCEPTANCE_LINES: list[str] = []


def random_connected(n, extra, seed):
    """Random spanning tree plus ``extra`` random links (connected, simple)."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        u, v = perm[i], perm[rng.integers(0, i)]
        edges.add((min(u, v), max(u, v)))
    target = min(len(edges) + extra, n * (n - 1) // 2)
    while len(edges) < target:
        u, v = rng.integers(0, n, 2)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, sorted(edges))


@pytest.fixture
def rand_graph():
    return random_connected


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
