import itertools

import numpy as np
import pytest

from cdrw.graph import Graph


def complete(n: int) -> Graph:
    return Graph.from_edges(n, list(itertools.combinations(range(n), 2)))


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def disjoint_cliques(k: int, copies: int) -> Graph:
    edges = [(a + c * k, b + c * k) for c in range(copies) for a, b in itertools.combinations(range(k), 2)]
    return Graph.from_edges(k * copies, edges)


def dense_transition(g: Graph) -> np.ndarray:
    """Column-stochastic ``A D^-1`` built entry by entry (independent of the sparse code)."""
    a = np.zeros((g.n, g.n))
    for u, v in g.edges.tolist():
        a[u, v] = a[v, u] = 1.0
    d = a.sum(axis=0)
    return a / np.where(d > 0, d, 1.0)


@pytest.fixture
def k4():
    return complete(4)
