"""Shared graph builders for the test suite."""

import numpy as np
import pytest

from netclust import Graph


def path_graph(n: int) -> Graph:
    return Graph(n, np.arange(n - 1), np.arange(1, n))


def cycle_graph(n: int) -> Graph:
    u = np.arange(n)
    return Graph(n, u, (u + 1) % n)


def complete_graph(n: int) -> Graph:
    iu, ju = np.triu_indices(n, k=1)
    return Graph(n, iu, ju)


def triangle() -> Graph:
    return Graph(3, [0, 1, 2], [1, 2, 0])


def two_triangles() -> Graph:
    """Two disjoint triangles on nodes 0-2 and 3-5."""
    return Graph(6, [0, 1, 2, 3, 4, 5], [1, 2, 0, 4, 5, 3])


def two_triangles_bridge() -> Graph:
    """Two triangles joined by the single edge (2, 3)."""
    return Graph(6, [0, 1, 2, 3, 4, 5, 2], [1, 2, 0, 4, 5, 3, 3])


def random_connected_graph(n: int, rng: np.random.Generator) -> Graph:
    """Uniform random spanning tree plus a few extra random edges."""
    # random attachment tree guarantees connectivity
    u = list(range(1, n))
    v = [int(rng.integers(i)) for i in range(1, n)]
    present = {(min(a, b), max(a, b)) for a, b in zip(u, v)}
    extra = rng.integers(0, max(1, n), size=2)
    for _ in range(int(extra.sum()) % (n + 1)):
        a, b = rng.integers(n, size=2)
        if a != b and (min(a, b), max(a, b)) not in present:
            present.add((min(int(a), int(b)), max(int(a), int(b))))
    edges = sorted(present)
    return Graph(n, [e[0] for e in edges], [e[1] for e in edges])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
