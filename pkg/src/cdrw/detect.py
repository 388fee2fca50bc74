"""
CDRW driver: grow a walk from a seed until the largest mixing set stops growing.

``detect_community`` returns the community of one seed; ``detect_all`` peels
communities off a shrinking pool of unassigned vertices until every vertex
belongs to exactly one community.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, bfs_ball
from .mixing import MixingSearchConfig, MixingSetResult, largest_mixing_set, tie_priority
from .walk import ProbVector, walk_step


@dataclass(frozen=True)
class CdrwConfig:
    delta: float
    max_walk_length: int | None = None  # None -> ceil(walk_c * log2 n)
    walk_c: float = 4.0
    mixing: MixingSearchConfig = field(default_factory=MixingSearchConfig)
    seed: int = 0

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.max_walk_length is not None and self.max_walk_length < 1:
            raise ValueError("max_walk_length must be at least 1")

    def walk_length(self, n: int) -> int:
        if self.max_walk_length is not None:
            return self.max_walk_length
        return max(1, math.ceil(self.walk_c * math.log2(max(n, 2))))


@dataclass
class CommunityResult:
    """Outcome of one seed: detected members plus the per-step trace."""

    seed: int
    members: np.ndarray
    stop_step: int | None  # walk length that triggered the stop rule, None if exhausted
    trace: list[dict] = field(default_factory=list)
    isolated: bool = False
    seed_included: bool = True

    def trace_jsonl(self) -> str:
        return "".join(json.dumps(rec) + "\n" for rec in self.trace)


@dataclass
class CommunityAssignment:
    """Disjoint communities plus the raw per-seed detections they were cut from.

    ``communities[i]`` is ``detected[i]`` intersected with the pool at the time
    seed ``seeds[i]`` was drawn, so ``communities`` always partitions ``V``.
    """

    communities: list[np.ndarray]
    seeds: list[int]
    residual: np.ndarray
    n: int
    detected: list[np.ndarray] = field(default_factory=list)

    def labels(self) -> np.ndarray:
        out = np.full(self.n, -1, dtype=np.int64)
        for i, c in enumerate(self.communities):
            out[c] = i
        return out


def seed_priority(cfg: CdrwConfig, s: int, n: int) -> np.ndarray:
    """Tie-break draws for one seed; shared with the CONGEST simulation."""
    return tie_priority(n, [cfg.seed, s])


def stop_rule(prev: MixingSetResult | None, cur: MixingSetResult, delta: float) -> bool:
    return prev is not None and cur.size < (1.0 + delta) * prev.size


def detect_community(g: Graph, s: int, cfg: CdrwConfig) -> CommunityResult:
    """Community of seed ``s``.

    Walk length grows from 1; at each length the largest mixing set ``S_l`` is
    computed. The first time ``|S_l| < (1 + delta) |S_prev|`` the previous set
    is returned. Lengths where no size mixes leave ``S_prev`` untouched.
    Selection is limited to vertices within ``max_walk_length`` hops of ``s``,
    the region a BFS tree of that depth can reach.
    """
    if not 0 <= s < g.n:
        raise ValueError("seed out of range")
    if g.degrees[s] == 0:
        warnings.warn(f"seed {s} is isolated; returning singleton", RuntimeWarning, stacklevel=2)
        return CommunityResult(s, np.array([s]), None, isolated=True)

    length = cfg.walk_length(g.n)
    reach = bfs_ball(g, s, length)
    priority = seed_priority(cfg, s, g.n)
    p = ProbVector.delta(g.n, s)
    prev = None
    trace = []
    for ell in range(1, length + 1):
        p = walk_step(g, p)
        cur = largest_mixing_set(g, p, cfg.mixing, candidates=reach, priority=priority)
        stop = cur is not None and stop_rule(prev, cur, cfg.delta)
        trace.append({
            "l": ell,
            "size": None if cur is None else cur.size,
            "score_sum": None if cur is None else cur.score_sum,
            "stopped": stop,
        })
        if stop:
            return _finish(s, prev.members, ell, trace)
        if cur is not None:
            prev = cur
    members = prev.members if prev is not None else np.array([s])
    return _finish(s, members, None, trace)


def _finish(s, members, stop_step, trace) -> CommunityResult:
    included = bool(np.any(members == s))
    if not included:
        warnings.warn(f"seed {s} is not in its own detected community", RuntimeWarning, stacklevel=3)
    return CommunityResult(s, members, stop_step, trace, seed_included=included)


def detect_all(g: Graph, cfg: CdrwConfig, detector=None) -> CommunityAssignment:
    """Partition ``V`` by repeatedly detecting the community of a random pool vertex.

    Each detected set is intersected with the pool before it is recorded; an
    empty intersection records the singleton seed.
    ``detector(g, s, cfg) -> members`` overrides the per-seed routine.
    """
    rng = np.random.default_rng(cfg.seed)
    pool = np.ones(g.n, dtype=bool)
    communities, seeds, detected = [], [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        while pool.any():
            s = int(rng.choice(np.flatnonzero(pool)))
            members = detector(g, s, cfg) if detector else detect_community(g, s, cfg).members
            mask = np.zeros(g.n, dtype=bool)
            mask[members] = True
            mask &= pool
            if not mask.any():
                mask[s] = True
            communities.append(np.flatnonzero(mask))
            detected.append(np.asarray(members, dtype=np.int64))
            seeds.append(s)
            pool &= ~mask
    return CommunityAssignment(communities, seeds, np.flatnonzero(pool), g.n, detected)
