"""
Random vertex partition across k machines and the conversion of CONGEST costs
into a k-machine round estimate ``M/k^2 + Delta*T/k``.

The estimate is the bare formula; the hidden polylog factor is not guessed and
is only flagged in the report (``polylog_factor_omitted``).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .congest import CostLedger
from .graph import Graph


def splitmix64(x: np.ndarray) -> np.ndarray:
    """Vectorized SplitMix64 finalizer (wrapping uint64 arithmetic)."""
    z = np.asarray(x, dtype=np.uint64) + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True, eq=False)
class RvpPartition:
    k: int
    home: np.ndarray
    seed: int

    def loads(self) -> np.ndarray:
        return np.bincount(self.home, minlength=self.k)


def rvp_partition(g: Graph | int, k: int, seed: int = 0) -> RvpPartition:
    """Hash every vertex id to one of ``k`` machines."""
    if k < 2:
        raise ValueError("the k-machine model needs k >= 2")
    n = g if isinstance(g, int) else g.n
    with np.errstate(over="ignore"):
        salt = splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
        h = splitmix64(np.arange(n, dtype=np.uint64) ^ salt)
    return RvpPartition(k, (h % np.uint64(k)).astype(np.int64), seed)


def forced_partition(home, k: int) -> RvpPartition:
    """Explicit assignment, for tests and what-if replays."""
    home = np.asarray(home, dtype=np.int64)
    if home.size and (home.min() < 0 or home.max() >= k):
        raise ValueError("machine id out of range")
    return RvpPartition(k, home, -1)


def cross_machine_messages(g: Graph, part: RvpPartition, ledger: CostLedger) -> int:
    """Messages of ``ledger`` whose endpoints live on different machines."""
    if ledger.n != g.n or ledger.m != g.m or part.home.size != g.n:
        raise ValueError("ledger, partition and graph describe different graphs")
    home = part.home
    flood_total = int((ledger.neighbor_sends * g.degrees).sum())
    tree_total = sum(len(e) * c for e, c in ledger.tree_traffic)
    if flood_total + tree_total != ledger.messages:
        raise ValueError("ledger traffic does not add up to its message count")

    e = g.edges
    crossing = home[e[:, 0]] != home[e[:, 1]]
    cross_deg = np.bincount(e[crossing].ravel(), minlength=g.n)
    total = int((ledger.neighbor_sends * cross_deg).sum())
    for edges, count in ledger.tree_traffic:
        total += count * int(np.count_nonzero(home[edges[:, 0]] != home[edges[:, 1]]))
    return total


@dataclass
class KMachineEstimate:
    M: int
    T: int
    delta_max: int
    k: int
    estimate: float
    sbm_form: float | None = None
    bandwidth: float = 1.0
    polylog_factor_omitted: bool = True

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def conversion_estimate(M: int, T: int, delta_max: int, k: int, bandwidth: float = 1.0,
                        n: int | None = None, r: int | None = None,
                        p: float | None = None, q: float | None = None) -> KMachineEstimate:
    """k-machine rounds ``M/k^2 + Delta*T/k`` (divided by ``bandwidth`` messages per link-round).

    With ``n, r, p, q`` also returns the planted-partition form
    ``(n^2/k^2 + n/(k r)) (p + q (r - 1))``.
    """
    if k < 2:
        raise ValueError("the k-machine model needs k >= 2")
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    est = (M / k**2 + delta_max * T / k) / bandwidth
    sbm = None
    if None not in (n, r, p, q):
        sbm = (n**2 / k**2 + n / (k * r)) * (p + q * (r - 1))
    return KMachineEstimate(int(M), int(T), int(delta_max), int(k), est, sbm, bandwidth)
