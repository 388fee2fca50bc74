"""Exact random-walk probability propagation on a :class:`~cdrw.graph.Graph`."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph


@dataclass(frozen=True)
class ProbVector:
    """Distribution of a simple random walk started at ``source`` after ``step`` steps."""

    values: np.ndarray
    step: int
    source: int

    @classmethod
    def delta(cls, n: int, source: int) -> "ProbVector":
        values = np.zeros(n)
        values[source] = 1.0
        return cls(values, 0, source)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def total(self) -> float:
        return float(self.values.sum())


def walk_step(g: Graph, prev: ProbVector, lazy: bool = False) -> ProbVector:
    """One flooding round: every vertex forwards ``p(u)/d(u)`` to each neighbor.

    ``lazy=True`` keeps half of the mass in place (off by default).
    """
    deg = g.degrees
    x = prev.values
    stuck = (deg == 0) & (x != 0)
    if stuck.any():
        raise ValueError(f"probability mass on isolated vertex {int(np.flatnonzero(stuck)[0])}")
    share = np.divide(x, deg, out=np.zeros_like(x), where=deg > 0)
    nxt = g.matrix @ share
    if lazy:
        nxt = 0.5 * (nxt + x)
    return ProbVector(nxt, prev.step + 1, prev.source)


def walk(g: Graph, source: int, steps: int, lazy: bool = False) -> ProbVector:
    p = ProbVector.delta(g.n, source)
    for _ in range(steps):
        p = walk_step(g, p, lazy)
    return p


def stationary(g: Graph) -> np.ndarray:
    """Degree-proportional distribution ``d(v) / 2m``."""
    if g.m == 0:
        raise ValueError("stationary distribution undefined on an edgeless graph")
    return g.degrees / (2.0 * g.m)


def restrict(p: ProbVector | np.ndarray, s) -> np.ndarray:
    """Copy of ``p`` that is zero outside ``s`` (its sum may fall below one)."""
    values = p.values if isinstance(p, ProbVector) else np.asarray(p, dtype=np.float64)
    out = np.zeros_like(values)
    s = np.asarray(s)
    if s.dtype == bool:
        out[s] = values[s]
    elif s.size:
        idx = s.astype(np.int64)
        out[idx] = values[idx]
    return out


def l1_to_stationary(g: Graph, p: ProbVector | np.ndarray) -> float:
    values = p.values if isinstance(p, ProbVector) else np.asarray(p)
    return float(np.abs(values - stationary(g)).sum())


def mixing_time(g: Graph, s: int, epsilon: float = 0.5, max_steps: int = 1000) -> int | None:
    """Smallest ``t <= max_steps`` with L1 distance to stationarity below ``epsilon``.

    Returns ``None`` when the walk has not mixed by ``max_steps`` (e.g. bipartite graphs).
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    p = ProbVector.delta(g.n, s)
    for t in range(max_steps + 1):
        if l1_to_stationary(g, p) < epsilon:
            return t
        p = walk_step(g, p)
    return None


def estimate_lambda2(g: Graph, iterations: int = 500, seed: int = 0) -> float:
    """Power-iteration estimate of the second largest |eigenvalue| of the transition matrix.

    Works on the symmetric matrix ``D^-1/2 A D^-1/2`` (same spectrum) and projects
    out its top eigenvector ``sqrt(d / 2m)`` on every iteration. Intended for tests
    and diagnostics; accuracy depends on the spectral gap between |lambda_2| and
    |lambda_3|.
    """
    deg = g.degrees.astype(np.float64)
    if np.any(deg == 0):
        raise ValueError("graph has isolated vertices")
    inv_sqrt = 1.0 / np.sqrt(deg)
    top = np.sqrt(deg / deg.sum())
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(g.n)
    x -= top * (top @ x)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iterations):
        y = inv_sqrt * (g.matrix @ (inv_sqrt * x))
        y -= top * (top @ y)
        est = float(np.linalg.norm(y))
        if est == 0.0:
            return 0.0
        x = y / est
    return est
