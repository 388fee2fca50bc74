import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdrw.graph import PpmParams, bfs_ball, generate_gnp, generate_gnpq
from cdrw.walk import (
    ProbVector,
    estimate_lambda2,
    l1_to_stationary,
    mixing_time,
    restrict,
    stationary,
    walk,
    walk_step,
)

from conftest import complete, cycle, dense_transition, path


def oracle_distribution(g, s, steps):
    x = np.zeros(g.n)
    x[s] = 1.0
    return np.linalg.matrix_power(dense_transition(g), steps) @ x


def test_path_steps():
    g = path(3)
    p1 = walk_step(g, ProbVector.delta(3, 0))
    assert p1.values.tolist() == [0.0, 1.0, 0.0] and p1.step == 1
    p2 = walk_step(g, p1)
    assert p2.values.tolist() == [0.5, 0.0, 0.5] and p2.step == 2


def test_k4_three_steps_matches_matrix_power():
    g = complete(4)
    got = walk(g, 0, 3).values
    assert np.max(np.abs(got - oracle_distribution(g, 0, 3))) < 1e-12


def test_isolated_mass_rejected():
    from cdrw.graph import Graph
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        walk_step(g, ProbVector.delta(3, 2))


def test_lazy_walk_on_bipartite_converges():
    g = cycle(4)
    p = walk(g, 0, 60, lazy=True)
    assert l1_to_stationary(g, p) < 1e-6
    assert walk(g, 0, 1, lazy=True).values[0] == 0.5


def test_restrict_examples():
    p = np.array([0.5, 0.3, 0.2])
    assert np.array_equal(restrict(p, [0, 1, 2]), p)
    assert np.array_equal(restrict(p, []), np.zeros(3))
    r = restrict(p, [0, 2])
    assert r.tolist() == [0.5, 0.0, 0.2] and r.sum() == pytest.approx(0.7)
    assert restrict(p, np.array([True, False, True])).tolist() == [0.5, 0.0, 0.2]


def test_l1_examples():
    g = generate_gnp(30, 0.4, seed=1)
    assert l1_to_stationary(g, stationary(g)) == pytest.approx(0.0, abs=1e-15)
    k2 = complete(2)
    assert l1_to_stationary(k2, ProbVector.delta(2, 0)) == 1.0


def test_l1_matches_oracle():
    g = generate_gnp(64, 0.3, seed=5)
    p10 = walk(g, 0, 10)
    oracle = np.abs(oracle_distribution(g, 0, 10) - g.degrees / (2 * g.m)).sum()
    assert abs(l1_to_stationary(g, p10) - oracle) < 1e-10


def test_mixing_time_examples():
    assert mixing_time(complete(10), 3, 0.5) <= 2
    assert mixing_time(cycle(4), 0, 0.1, max_steps=100) is None


def test_mixing_time_gnp_logarithmic():
    n = 1024
    for seed in range(10):
        g = generate_gnp(n, 2 * math.log2(n) / n, seed)
        s = int(np.argmax(g.degrees))
        t = mixing_time(g, s, 0.5, max_steps=200)
        assert t is not None and t <= 4 * math.log2(n)


def test_lambda2_complete_and_cycle():
    assert estimate_lambda2(complete(4)) == pytest.approx(1 / 3, abs=1e-6)
    assert estimate_lambda2(cycle(4)) == pytest.approx(1.0, abs=1e-6)
    for g in (complete(4), cycle(4), complete(7)):
        eig = np.sort(np.abs(np.linalg.eigvals(dense_transition(g))))
        assert estimate_lambda2(g) == pytest.approx(eig[-2], abs=1e-6)


def test_lambda2_matches_dense_eigensolver():
    g, _ = generate_gnpq(PpmParams(40, 2, 0.4, 0.05, seed=3))
    eig = np.sort(np.abs(np.linalg.eigvals(dense_transition(g))))
    assert estimate_lambda2(g, iterations=3000) == pytest.approx(eig[-2], rel=1e-3)


def test_lambda2_gnp_bound():
    n = 2048
    p = 2 * math.log2(n) / n
    dbar = (n - 1) * p
    for seed in range(10):
        g = generate_gnp(n, p, seed)
        if g.degrees.min() == 0:
            continue
        assert estimate_lambda2(g, iterations=200, seed=seed) <= 2 / math.sqrt(dbar)


def small_graphs():
    return st.tuples(st.integers(0, 10_000), st.integers(2, 60), st.floats(0.05, 0.6))


@settings(max_examples=40, deadline=None)
@given(small_graphs(), st.integers(0, 12))
def test_walk_properties(gspec, steps):
    seed, n, prob = gspec
    g = generate_gnp(n, prob, seed)
    s = int(np.argmax(g.degrees))
    if g.degrees[s] == 0:
        return
    p = walk(g, s, steps)
    # mass conservation, support growth, oracle equality
    assert abs(p.total() - 1.0) < 1e-9
    assert set(p.support.tolist()) <= set(bfs_ball(g, s, steps).tolist())
    assert np.max(np.abs(p.values - oracle_distribution(g, s, steps))) < 1e-10


@settings(max_examples=25, deadline=None)
@given(small_graphs(), st.integers(1, 8))
def test_reversibility(gspec, steps):
    seed, n, prob = gspec
    g = generate_gnp(n, prob, seed)
    if g.degrees.min() == 0:
        return
    pi = stationary(g)
    rng = np.random.default_rng(seed)
    s, u = rng.integers(n, size=2)
    fwd = walk(g, int(s), steps).values[u]
    back = walk(g, int(u), steps).values[s]
    assert pi[s] * fwd == pytest.approx(pi[u] * back, abs=1e-12)


def test_stationary_is_fixed_point():
    g = generate_gnp(50, 0.3, seed=8)
    pi = stationary(g)
    nxt = walk_step(g, ProbVector(pi, 0, 0)).values
    assert np.allclose(nxt, pi, atol=1e-15)
    assert pi.sum() == pytest.approx(1.0)
