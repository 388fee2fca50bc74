"""
Round and message accounting for CDRW run as a CONGEST-model protocol.

The simulation computes exactly what the in-process driver computes, while
charging every phase to a :class:`CostLedger`:

* ``bfs``: layered flooding from the seed, one round per layer;
* ``flood``: one round per walk step, ``d(u)`` messages from every vertex
  holding probability mass;
* ``select``: bisection over scores through broadcast + convergecast on the
  BFS tree, ``2 * height`` rounds and ``2 * (tree edges)`` messages per probe;
* ``control``: one tree broadcast per walk length announcing the chosen set.

Besides totals, the ledger keeps enough traffic detail (who flooded how often,
which tree edges carried how many messages) for a k-machine replay.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .detect import CdrwConfig, seed_priority, stop_rule
from .graph import Graph, gather_neighbors
from .mixing import MixingSearchConfig, MixingSetResult, candidate_sizes, jitter_scores
from .walk import ProbVector, walk_step

PHASES = ("bfs", "flood", "select", "control")
MAX_PROBES = 64


@dataclass
class CostLedger:
    n: int
    m: int
    per_phase: dict = field(default_factory=lambda: {ph: [0, 0] for ph in PHASES})
    neighbor_sends: np.ndarray | None = None
    tree_traffic: list = field(default_factory=list)  # [edges (E, 2), messages per edge]
    select_probes: list = field(default_factory=list)

    def __post_init__(self):
        if self.neighbor_sends is None:
            self.neighbor_sends = np.zeros(self.n, dtype=np.int64)

    @classmethod
    def for_graph(cls, g: Graph) -> "CostLedger":
        return cls(g.n, g.m)

    @property
    def rounds(self) -> int:
        return sum(r for r, _ in self.per_phase.values())

    @property
    def messages(self) -> int:
        return sum(msg for _, msg in self.per_phase.values())

    def charge(self, phase: str, rounds: int, messages: int) -> None:
        if rounds < 0 or messages < 0:
            raise ValueError("charges must be nonnegative")
        entry = self.per_phase[phase]
        entry[0] += int(rounds)
        entry[1] += int(messages)

    def charge_flood(self, phase: str, g: Graph, senders: np.ndarray, rounds: int) -> None:
        """``senders`` each message all of their neighbors once."""
        self.neighbor_sends[senders] += 1
        self.charge(phase, rounds, int(g.degrees[senders].sum()))

    def charge_tree(self, phase: str, tree: "BfsTree", passes: int) -> None:
        """``passes`` sweeps over the tree, one message per tree edge per sweep."""
        if passes <= 0:
            return
        edges = tree.edges
        if self.tree_traffic and self.tree_traffic[-1][0] is edges:
            self.tree_traffic[-1][1] += passes
        else:
            self.tree_traffic.append([edges, passes])
        self.charge(phase, passes * tree.height, passes * len(edges))

    def to_dict(self, **meta) -> dict:
        out = dict(meta)
        out.update({
            "n": self.n,
            "m": self.m,
            "rounds": self.rounds,
            "messages": self.messages,
            "per_phase": {ph: {"rounds": r, "messages": msg} for ph, (r, msg) in self.per_phase.items()},
        })
        return out

    def to_json(self, **meta) -> str:
        return json.dumps(self.to_dict(**meta), indent=2, sort_keys=True)


@dataclass(frozen=True, eq=False)
class BfsTree:
    root: int
    parent: np.ndarray  # -1 for the root and for uncovered vertices
    depth: np.ndarray  # -1 for uncovered vertices

    @property
    def height(self) -> int:
        return int(self.depth.max())

    @property
    def vertices(self) -> np.ndarray:
        return np.flatnonzero(self.depth >= 0)

    @property
    def edges(self) -> np.ndarray:
        child = np.flatnonzero(self.parent >= 0)
        return np.column_stack([child, self.parent[child]])


def build_bfs(g: Graph, root: int, depth_cap: int, ledger: CostLedger | None = None) -> BfsTree:
    """Layered BFS by flooding; parents are the smallest-id neighbor in the previous layer.

    Every reached vertex below ``depth_cap`` forwards the token to all of its
    neighbors; one round is charged per layer that discovers new vertices.
    """
    if not 0 <= root < g.n:
        raise ValueError("root out of range")
    depth = np.full(g.n, -1, dtype=np.int64)
    parent = np.full(g.n, -1, dtype=np.int64)
    depth[root] = 0
    frontier = np.array([root], dtype=np.int64)
    senders = []
    level = 0
    while frontier.size and level < depth_cap:
        senders.append(frontier)
        counts = g.degrees[frontier]
        src = np.repeat(frontier, counts)
        dst = gather_neighbors(g, frontier)
        fresh = depth[dst] < 0
        src, dst = src[fresh], dst[fresh]
        if dst.size == 0:
            break
        # smallest sender wins for each newly reached vertex
        order = np.lexsort((src, dst))
        dst, src = dst[order], src[order]
        first = np.ones(dst.size, dtype=bool)
        first[1:] = dst[1:] != dst[:-1]
        level += 1
        depth[dst[first]] = level
        parent[dst[first]] = src[first]
        frontier = dst[first]
    tree = BfsTree(root, parent, depth)
    if ledger is not None:
        ledger.charge_flood("bfs", g, np.concatenate(senders) if senders else np.empty(0, np.int64), 0)
        ledger.charge("bfs", tree.height, 0)
    return tree


def flood_step_cost(g: Graph, prev: ProbVector, ledger: CostLedger) -> ProbVector:
    """``walk_step`` plus its cost: one round, ``d(u)`` messages per vertex with mass."""
    nxt = walk_step(g, prev)
    ledger.charge_flood("flood", g, np.flatnonzero(prev.values), 1)
    return nxt


def distributed_select(tree: BfsTree, scores: np.ndarray, k: int, ledger: CostLedger | None = None,
                       priority: np.ndarray | None = None,
                       scale: float = 1e-12) -> tuple[np.ndarray, float]:
    """The ``k`` smallest-score tree vertices, found by bisection through the tree.

    Each probe broadcasts a threshold and convergecasts the qualified count
    together with the largest qualified and smallest unqualified score, which
    become the next bracket. Scores are pre-jittered to be distinct; any tie
    that survives float rounding is settled by ``priority`` in one extra probe.
    """
    cov = tree.vertices
    if k > cov.size:
        raise ValueError(f"cannot select {k} of {cov.size} tree vertices")
    x = np.asarray(scores, dtype=np.float64)[cov]
    pr = cov / max(tree.parent.size, 1) if priority is None else np.asarray(priority)[cov]
    if k == 0:
        return np.empty(0, dtype=np.int64), 0.0
    keys = jitter_scores(x, pr, scale)
    # sorted copy only answers "how many keys <= t" quickly; it plays the convergecast
    srt = np.sort(keys)
    lo, hi = srt[0], srt[-1]
    thr = hi
    probes = 0
    chosen = None
    while probes < MAX_PROBES:
        probes += 1
        c = int(np.searchsorted(srt, thr, side="right"))
        if c == k:
            chosen = keys <= thr
            break
        if c < k:
            lo = srt[c]
        else:
            hi = srt[c - 1]
        if lo >= hi:
            break
        thr = lo + (hi - lo) / 2
        if thr >= hi:
            thr = lo
    if chosen is None:
        probes += 1
        b = srt[k - 1]
        chosen = keys < b
        tied = np.flatnonzero(keys == b)
        need = k - int(chosen.sum())
        chosen[tied[np.argsort(pr[tied], kind="stable")[:need]]] = True
    if ledger is not None:
        ledger.charge_tree("select", tree, 2 * probes)
        ledger.select_probes.append(probes)
    members = cov[chosen]
    return members, math.fsum(x[chosen])


@dataclass
class CongestRun:
    members: np.ndarray
    ledger: CostLedger
    tree: BfsTree
    sizes: list = field(default_factory=list)


def _congest_mixing_set(g: Graph, p: ProbVector, cfg: MixingSearchConfig, tree: BfsTree,
                        priority: np.ndarray, ledger: CostLedger) -> MixingSetResult | None:
    avg = 2.0 * g.m / g.n
    cov = tree.vertices
    best = None
    for k in candidate_sizes(g.n, cfg, limit=cov.size):
        x = np.abs(p.values - g.degrees / (avg * k))
        members, total = distributed_select(tree, x, k, ledger, priority, cfg.tie_break_scale)
        if total < cfg.epsilon_threshold:
            best = MixingSetResult(np.sort(members), k, p.step, total)
    # indicator broadcast naming the chosen size
    ledger.charge_tree("control", tree, 1)
    return best


def run_cdrw_congest(g: Graph, s: int, cfg: CdrwConfig) -> tuple[np.ndarray, CostLedger]:
    """CDRW from seed ``s`` with full CONGEST cost accounting."""
    run = simulate_cdrw(g, s, cfg)
    return run.members, run.ledger


def simulate_cdrw(g: Graph, s: int, cfg: CdrwConfig, ledger: CostLedger | None = None) -> CongestRun:
    if not 0 <= s < g.n:
        raise ValueError("seed out of range")
    ledger = ledger if ledger is not None else CostLedger.for_graph(g)
    length = cfg.walk_length(g.n)
    tree = build_bfs(g, s, length, ledger)
    if g.degrees[s] == 0:
        return CongestRun(np.array([s]), ledger, tree)
    priority = seed_priority(cfg, s, g.n)
    p = ProbVector.delta(g.n, s)
    prev = None
    sizes = []
    for _ in range(length):
        p = flood_step_cost(g, p, ledger)
        cur = _congest_mixing_set(g, p, cfg.mixing, tree, priority, ledger)
        sizes.append(None if cur is None else cur.size)
        if cur is not None and stop_rule(prev, cur, cfg.delta):
            return CongestRun(prev.members, ledger, tree, sizes)
        if cur is not None:
            prev = cur
    members = prev.members if prev is not None else np.array([s])
    return CongestRun(members, ledger, tree, sizes)


def detect_all_congest(g: Graph, cfg: CdrwConfig):
    """``detect_all`` with every seed run through the simulator; returns (assignment, ledger)."""
    from .detect import detect_all

    ledger = CostLedger.for_graph(g)

    def detector(graph, s, c):
        return simulate_cdrw(graph, s, c, ledger).members

    return detect_all(g, cfg, detector=detector), ledger
