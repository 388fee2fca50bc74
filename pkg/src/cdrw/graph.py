"""
Graph container, planted-partition generators and exact structural quantities.

Graphs are stored in CSR form (``indptr``/``indices``) with sorted neighbor
lists. Random graphs are sampled with geometric skipping over the pair index
space, so generation costs O(n + m) expected time instead of O(n^2).

RNG convention: every generator call builds a ``numpy.random.SeedSequence``
from the user seed and spawns one child stream per block pair ``(i, j)`` with
``i <= j``, in row-major order. Block pair streams are therefore independent
of each other and of the order in which pairs are processed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> "Graph":
        """Build a graph from an edge list; duplicates are merged, self-loops rejected."""
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if n < 0:
            raise ValueError("n must be nonnegative")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loops are not allowed")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        if len(lo):
            key = np.unique(lo * n + hi)
            lo, hi = key // n, key % n
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n, indptr, cols.astype(np.int64))

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(u).tolist() for u in range(self.n)]

    @cached_property
    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges with ``u < v``, sorted lexicographically."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class GroundTruth:
    labels: np.ndarray
    r: int

    @property
    def block_size(self) -> int:
        return self.labels.size // self.r

    def block(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.labels == i)

    def blocks(self) -> list[np.ndarray]:
        return [self.block(i) for i in range(self.r)]

    def block_of(self, v: int) -> np.ndarray:
        return self.block(int(self.labels[v]))


@dataclass(frozen=True)
class PpmParams:
    """Symmetric planted partition model: ``r`` blocks of ``n_c`` vertices."""

    n_c: int
    r: int
    p: float
    q: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_c < 2:
            raise ValueError("n_c must be at least 2")
        if self.r < 1:
            raise ValueError("r must be at least 1")
        _check_prob(self.p, "p")
        _check_prob(self.q, "q")
        if self.q > self.p:
            raise ValueError("planted partition requires q <= p")

    @property
    def n(self) -> int:
        return self.n_c * self.r


def _check_prob(x: float, name: str) -> None:
    if not (0.0 <= x <= 1.0) or math.isnan(x):
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def _skip_sample(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices in ``range(total)`` kept independently with probability ``p``."""
    if p <= 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    out = []
    pos = -1
    batch = max(16, int(total * p * 1.1) + 16)
    while True:
        gaps = rng.geometric(p, size=batch).astype(np.int64)
        # tiny p can overflow int64; any gap past the end ends the scan
        gaps = np.where(gaps <= 0, total + 1, np.minimum(gaps, total + 1))
        idx = pos + np.cumsum(gaps)
        if idx[-1] >= total:
            out.append(idx[idx < total])
            break
        out.append(idx)
        pos = int(idx[-1])
        batch = max(16, int((total - pos) * p * 1.1) + 16)
    return np.concatenate(out)


def _triangle_pairs(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map pair index ``k`` to ``(w, v)`` with ``w < v`` and ``k = v(v-1)/2 + w``."""
    v = ((1.0 + np.sqrt(1.0 + 8.0 * k.astype(np.float64))) / 2.0).astype(np.int64)
    # float rounding can be off by one for very large k
    v -= (v * (v - 1) // 2) > k
    v += ((v + 1) * v // 2) <= k
    return k - v * (v - 1) // 2, v


def _block_streams(seed: int, r: int) -> dict[tuple[int, int], np.random.Generator]:
    pairs = [(i, j) for i in range(r) for j in range(i, r)]
    children = np.random.SeedSequence(seed).spawn(len(pairs))
    return {pair: np.random.Generator(np.random.PCG64(ss)) for pair, ss in zip(pairs, children)}


def generate_gnpq(params: PpmParams) -> tuple[Graph, GroundTruth]:
    """Sample a planted partition graph and its block labels."""
    nc, r = params.n_c, params.r
    streams = _block_streams(params.seed, r)
    chunks = []
    for (i, j), rng in streams.items():
        if i == j:
            k = _skip_sample(nc * (nc - 1) // 2, params.p, rng)
            w, v = _triangle_pairs(k)
            chunks.append(np.column_stack([w + i * nc, v + i * nc]))
        else:
            k = _skip_sample(nc * nc, params.q, rng)
            chunks.append(np.column_stack([k // nc + i * nc, k % nc + j * nc]))
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    labels = np.repeat(np.arange(r, dtype=np.int64), nc)
    return Graph.from_edges(params.n, edges), GroundTruth(labels, r)


def generate_gnp(n: int, p: float, seed: int = 0) -> Graph:
    """Erdos-Renyi G(n, p). Same stream layout as a one-block ``generate_gnpq``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_prob(p, "p")
    rng = _block_streams(seed, 1)[(0, 0)]
    w, v = _triangle_pairs(_skip_sample(n * (n - 1) // 2, p, rng))
    return Graph.from_edges(n, np.column_stack([w, v]))


def _as_mask(n: int, s) -> np.ndarray:
    s = np.asarray(s)
    if s.dtype == bool:
        if s.size != n:
            raise ValueError("mask length must equal n")
        return s
    mask = np.zeros(n, dtype=bool)
    mask[s.astype(np.int64)] = True
    return mask


def volume(g: Graph, s) -> int:
    return int(g.degrees[_as_mask(g.n, s)].sum())


def cut_size(g: Graph, s) -> int:
    mask = _as_mask(g.n, s)
    e = g.edges
    return int(np.count_nonzero(mask[e[:, 0]] != mask[e[:, 1]]))


def conductance_of_set(g: Graph, s) -> float:
    """Cut edges over the smaller of the two side volumes."""
    mask = _as_mask(g.n, s)
    k = int(mask.sum())
    if k == 0 or k == g.n:
        raise ValueError("conductance needs a nonempty proper subset")
    vol_s = int(g.degrees[mask].sum())
    denom = min(vol_s, 2 * g.m - vol_s)
    cut = cut_size(g, mask)
    if denom == 0:
        # no edges touch one side, so there is nothing to cut
        return 0.0
    return cut / denom


def ppm_analytic_conductance(params: PpmParams) -> float:
    """Expected one-step escape probability ``q(r-1) / (p + q(r-1))`` of a block."""
    if params.p <= 0:
        raise ValueError("p must be positive")
    if params.r == 1:
        return 0.0
    out = params.q * (params.r - 1)
    return out / (params.p + out)


def gather_neighbors(g: Graph, vertices: np.ndarray) -> np.ndarray:
    """Concatenated neighbor lists of ``vertices`` (with repeats)."""
    counts = g.degrees[vertices]
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offsets = np.repeat(g.indptr[vertices] - np.cumsum(counts) + counts, counts)
    return g.indices[offsets + np.arange(total)]


def bfs_distances(g: Graph, s: int, radius: int | None = None) -> np.ndarray:
    """Hop distance from ``s``; ``-1`` for vertices not reached (within ``radius``)."""
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[s] = 0
    frontier = np.array([s], dtype=np.int64)
    depth = 0
    while frontier.size and (radius is None or depth < radius):
        nbrs = np.unique(gather_neighbors(g, frontier))
        nbrs = nbrs[dist[nbrs] < 0]
        depth += 1
        dist[nbrs] = depth
        frontier = nbrs
    return dist


def bfs_ball(g: Graph, s: int, radius: int) -> np.ndarray:
    """Sorted vertices within ``radius`` hops of ``s``."""
    if not 0 <= s < g.n:
        raise ValueError("source out of range")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return np.flatnonzero(bfs_distances(g, s, radius) >= 0)


def connected_components(g: Graph) -> list[np.ndarray]:
    """Components as sorted vertex arrays, ordered by smallest member."""
    _, labels = _cc(g.matrix, directed=False)
    # relabel so component order follows the smallest vertex id
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    return [np.flatnonzero(labels == labels[first[i]]) for i in order]


# -- edge-list files ---------------------------------------------------------

def write_edgelist(g: Graph, path) -> None:
    lines = [f"# n={g.n} m={g.m}"]
    lines += [f"{u} {v}" for u, v in g.edges.tolist()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_edgelist(path) -> Graph:
    text = Path(path).read_text(encoding="ascii").splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing '# n=<n> m=<m>' header")
    header = dict(tok.split("=", 1) for tok in text[0][1:].split())
    n, m = int(header["n"]), int(header["m"])
    body = [ln.split() for ln in text[1:] if ln.strip()]
    edges = np.array([[int(a), int(b)] for a, b in body], dtype=np.int64).reshape(-1, 2)
    g = Graph.from_edges(n, edges)
    if g.m != m:
        raise ValueError(f"{path}: header says m={m} but file holds {g.m} edges")
    return g


def write_labels(truth: GroundTruth, path) -> None:
    lines = [f"{v} {b}" for v, b in enumerate(truth.labels.tolist())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_labels(path) -> GroundTruth:
    rows = [ln.split() for ln in Path(path).read_text(encoding="ascii").splitlines() if ln.strip()]
    arr = np.array([[int(a), int(b)] for a, b in rows], dtype=np.int64).reshape(-1, 2)
    labels = np.empty(len(arr), dtype=np.int64)
    labels[arr[:, 0]] = arr[:, 1]
    return GroundTruth(labels, int(labels.max()) + 1 if labels.size else 0)
