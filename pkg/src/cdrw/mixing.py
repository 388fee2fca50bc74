"""
Largest local mixing set at a fixed walk length.

For a candidate size ``k`` every vertex scores ``x_u = |p(u) - d(u) / (d_avg * k)|``
where ``d_avg * k = (2m/n) * k`` stands in for the volume of the unknown set. The
``k`` smallest scores form the candidate and the size passes when their sum is
below ``1/(2e)``. Sizes follow the schedule ``R, R*g, R*g^2, ... , n`` with
``g = 1 + 1/(8e)``.

Ties in ``x_u`` are broken by a per-vertex uniform draw ``u_v`` that plays the
role of an additive jitter ``u_v * scale * gap`` (``gap`` = smallest positive
difference between scores). With ``scale < 1`` such a jitter never reorders
distinct scores, so ordering by ``(x, u)`` lexicographically is exactly the
order of the jittered values, without losing the jitter to float rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .walk import ProbVector

INV_2E = 1.0 / (2.0 * math.e)
GROWTH = 1.0 + 1.0 / (8.0 * math.e)


@dataclass(frozen=True)
class MixingSearchConfig:
    epsilon_threshold: float = INV_2E
    growth_factor: float = GROWTH
    initial_size: int | None = None  # None -> ceil(log2 n)
    tie_break_scale: float = 1e-12

    def __post_init__(self):
        if not 0 < self.epsilon_threshold < 1:
            raise ValueError("epsilon_threshold must lie in (0, 1)")
        if self.growth_factor <= 1:
            raise ValueError("growth_factor must exceed 1")
        if self.initial_size is not None and self.initial_size < 1:
            raise ValueError("initial_size must be at least 1")
        if not 0 <= self.tie_break_scale < 1:
            raise ValueError("tie_break_scale must lie in [0, 1)")

    def start_size(self, n: int) -> int:
        if self.initial_size is not None:
            return self.initial_size
        return max(1, math.ceil(math.log2(n))) if n > 1 else 1


@dataclass(frozen=True)
class MixingSetResult:
    members: np.ndarray
    size: int
    step: int
    score_sum: float


def candidate_sizes(n: int, cfg: MixingSearchConfig, limit: int | None = None) -> list[int]:
    """Geometric schedule of candidate sizes, strictly increasing, capped at ``limit`` (default ``n``)."""
    cap = n if limit is None else min(n, limit)
    start = cfg.start_size(n)
    if start > cap:
        return []
    sizes = [start]
    real = float(start)
    while sizes[-1] < cap:
        real *= cfg.growth_factor
        k = max(math.ceil(real - 1e-9), sizes[-1] + 1)
        real = max(real, float(k))
        sizes.append(min(k, cap))
    return sizes


def _values(p) -> np.ndarray:
    return p.values if isinstance(p, ProbVector) else np.asarray(p, dtype=np.float64)


def deviation_scores(g: Graph, p, candidate_size: int) -> np.ndarray:
    """Per-vertex ``|p(u) - d(u) / ((2m/n) * candidate_size)|``."""
    if candidate_size < 1:
        raise ValueError("candidate_size must be at least 1")
    if g.m == 0:
        raise ValueError("average-volume surrogate needs at least one edge")
    avg_vol = (2.0 * g.m / g.n) * candidate_size
    return np.abs(_values(p) - g.degrees / avg_vol)


def tie_priority(n: int, seed) -> np.ndarray:
    """Uniform draws in [0, 1) used as the infinitesimal tie-break jitter."""
    return np.random.default_rng(seed).random(n)


def jitter_scores(scores: np.ndarray, priority: np.ndarray, scale: float = 1e-12) -> np.ndarray:
    """Add ``priority * scale * min_gap`` when duplicate scores exist.

    The result keeps the order of distinct scores. Jitter below float resolution
    may still leave ties; callers fall back to ``priority`` for those.
    """
    srt = np.sort(scores)
    gaps = np.diff(srt)
    if gaps.size == 0 or np.all(gaps > 0):
        return scores.copy()
    positive = gaps[gaps > 0]
    gap = positive.min() if positive.size else max(abs(float(srt[-1])), 1.0)
    return scores + priority * (scale * gap)


def select_smallest(scores: np.ndarray, k: int, priority: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """The ``k`` vertices with the smallest scores and their score sum.

    Returns members as a sorted index array. Ties go to the smaller ``priority``
    (vertex id when ``priority`` is omitted).
    """
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.size
    if k > n:
        raise ValueError(f"cannot select {k} of {n} scores")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if priority is None:
        order = np.argsort(scores, kind="stable")
    else:
        order = np.lexsort((priority, scores))
    chosen = np.sort(order[:k])
    return chosen, math.fsum(scores[chosen])


def smallest_sum(scores: np.ndarray, k: int) -> float:
    """Correctly rounded sum of the ``k`` smallest scores (order independent)."""
    if k == scores.size:
        return math.fsum(scores)
    return math.fsum(np.partition(scores, k - 1)[:k])


def largest_mixing_set(g: Graph, p, cfg: MixingSearchConfig | None = None,
                       candidates: np.ndarray | None = None,
                       priority: np.ndarray | None = None) -> MixingSetResult | None:
    """Largest schedule size whose ``k`` smallest scores sum below the threshold.

    ``candidates`` restricts which vertices may be selected (default: all);
    the surrogate volume still uses global ``n`` and ``m``. Every size in the
    schedule is tested, since passing sizes cluster around the size of the set
    the walk has mixed on rather than forming a prefix of the schedule.
    Returns ``None`` when no size passes.
    """
    cfg = cfg or MixingSearchConfig()
    values = _values(p)
    step = p.step if isinstance(p, ProbVector) else -1
    idx = np.arange(g.n) if candidates is None else np.asarray(candidates, dtype=np.int64)
    pv, deg = values[idx], g.degrees[idx].astype(np.float64)
    avg = 2.0 * g.m / g.n
    best = None
    for k in candidate_sizes(g.n, cfg, limit=idx.size):
        x = np.abs(pv - deg / (avg * k))
        if smallest_sum(x, k) < cfg.epsilon_threshold:
            best = k
    if best is None:
        return None
    x = np.abs(pv - deg / (avg * best))
    local, total = select_smallest(x, best, None if priority is None else priority[idx])
    return MixingSetResult(np.sort(idx[local]), best, step, total)
