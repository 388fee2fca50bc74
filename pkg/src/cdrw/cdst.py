"""
Community detection by sparsification and triangulation.

Every round each active vertex drops its ``count = min(d-1, floor(alpha/r * d))``
weakest incident edges (Jaccard similarity of the endpoint neighborhoods) and
re-wires one edge per removal inside its neighborhood. The cooling factor
``alpha/r`` drives every count to zero, after which the connected components
are the communities.

Rounds are synchronous: all vertices pick their edges from the state at the
start of the round, then removals are applied (each edge once), then the
triangulation additions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detect import CommunityAssignment
from .graph import Graph, connected_components
from .kmachine import splitmix64


@dataclass(frozen=True)
class CdstConfig:
    alpha: float
    seed: int = 0
    use_minhash: bool = False
    minhash_hashes: int = 64

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.minhash_hashes < 1:
            raise ValueError("minhash_hashes must be at least 1")


class MutableGraphState:
    """Adjacency sets that CDST rewires in place."""

    def __init__(self, n: int, adj: list[set[int]]):
        self.n = n
        self.adj = adj
        self.round = 0

    @classmethod
    def from_graph(cls, g: Graph) -> "MutableGraphState":
        return cls(g.n, [set(g.neighbors(u).tolist()) for u in range(g.n)])

    def neighbors(self, u: int) -> set[int]:
        return self.adj[u]

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def add_edge(self, u: int, v: int) -> bool:
        if u == v or v in self.adj[u]:
            return False
        self.adj[u].add(v)
        self.adj[v].add(u)
        return True

    def remove_edge(self, u: int, v: int) -> None:
        self.adj[u].discard(v)
        self.adj[v].discard(u)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def to_graph(self) -> Graph:
        edges = [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]
        return Graph.from_edges(self.n, np.array(edges, dtype=np.int64).reshape(-1, 2))


def _nbrs(g, u) -> set:
    nb = g.neighbors(u)
    return nb if isinstance(nb, set) else set(np.asarray(nb).tolist())


def _require_edge(g, u, v) -> None:
    if v not in _nbrs(g, u):
        raise ValueError(f"({u}, {v}) is not an edge")


def edge_strength(g, u: int, v: int) -> float:
    """``|N(u) & N(v)| / |N(u) | N(v)|`` for an existing edge."""
    _require_edge(g, u, v)
    a, b = _nbrs(g, u), _nbrs(g, v)
    return len(a & b) / len(a | b)


def _minhash_salts(hashes: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2**63, size=hashes, dtype=np.int64).astype(np.uint64)


def minhash_signature(items, salts: np.ndarray) -> np.ndarray:
    x = np.fromiter(items, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = splitmix64(x[None, :] ^ salts[:, None])
    return h.min(axis=1)


def minhash_jaccard(a, b, hashes: int = 64, seed: int = 0) -> float:
    """Fraction of ``hashes`` salted hash functions whose minimum agrees on ``a`` and ``b``."""
    a, b = set(a), set(b)
    if not a and not b:
        raise ValueError("jaccard of two empty sets is undefined")
    if not a or not b:
        return 0.0
    salts = _minhash_salts(hashes, seed)
    return float(np.mean(minhash_signature(a, salts) == minhash_signature(b, salts)))


def minhash_strength(g, u: int, v: int, hashes: int = 64, seed: int = 0) -> float:
    _require_edge(g, u, v)
    return minhash_jaccard(_nbrs(g, u), _nbrs(g, v), hashes, seed)


@dataclass
class CdstRun:
    assignment: CommunityAssignment
    state: MutableGraphState
    rounds: int
    vertex_rounds: np.ndarray  # rounds each vertex stayed active
    max_degree_seen: np.ndarray


def _strengths(state: MutableGraphState, v: int, cfg: CdstConfig, salts, sig_cache) -> list[tuple[float, int]]:
    out = []
    nv = state.adj[v]
    for u in nv:
        nu = state.adj[u]
        if cfg.use_minhash:
            for w, nb in ((v, nv), (u, nu)):
                if w not in sig_cache:
                    sig_cache[w] = minhash_signature(nb, salts)
            s = float(np.mean(sig_cache[v] == sig_cache[u]))
        else:
            s = len(nv & nu) / len(nv | nu)
        out.append((s, u))
    return out


def _triangulate(state: MutableGraphState, v: int, rng: np.random.Generator) -> None:
    nb = sorted(state.adj[v])
    if len(nb) >= 2:
        x, y = rng.choice(nb, size=2, replace=False)
        if state.add_edge(int(x), int(y)):
            return
    if not nb:
        return
    u = int(rng.choice(nb))
    far = sorted(state.adj[u])
    y = int(rng.choice(far))
    state.add_edge(v, y)


def run_cdst_detailed(g: Graph, cfg: CdstConfig) -> CdstRun:
    rng = np.random.default_rng(cfg.seed)
    state = MutableGraphState.from_graph(g)
    active = np.ones(g.n, dtype=bool)
    vertex_rounds = np.zeros(g.n, dtype=np.int64)
    max_deg = g.degrees.copy()
    salts = _minhash_salts(cfg.minhash_hashes, cfg.seed) if cfg.use_minhash else None
    r = 0
    while active.any():
        r += 1
        state.round = r
        plans = []
        sig_cache = {}
        for v in np.flatnonzero(active).tolist():
            d = state.degree(v)
            count = min(d - 1, math.floor(cfg.alpha / r * d))
            if count <= 0:
                active[v] = False
                continue
            vertex_rounds[v] += 1
            ranked = sorted(_strengths(state, v, cfg, salts, sig_cache))
            plans.append((v, [u for _, u in ranked[:count]]))
        # sparsify: each edge removed once, never isolating an endpoint
        removed = {}
        for v, targets in plans:
            for u in targets:
                if state.has_edge(v, u) and state.degree(u) > 1 and state.degree(v) > 1:
                    state.remove_edge(v, u)
                    removed[v] = removed.get(v, 0) + 1
        for v, _ in plans:
            for _ in range(removed.get(v, 0)):
                _triangulate(state, v, rng)
        deg_now = np.fromiter((len(a) for a in state.adj), dtype=np.int64, count=g.n)
        np.maximum(max_deg, deg_now, out=max_deg)
    final = state.to_graph()
    comps = connected_components(final)
    assignment = CommunityAssignment(comps, [int(c[0]) for c in comps], np.empty(0, dtype=np.int64), g.n,
                                     [c.copy() for c in comps])
    return CdstRun(assignment, state, r, vertex_rounds, max_deg)


def run_cdst(g: Graph, cfg: CdstConfig) -> CommunityAssignment:
    """Communities are the connected components left after the reorientation rounds."""
    return run_cdst_detailed(g, cfg).assignment
