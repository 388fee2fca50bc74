import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdrw.graph import PpmParams, bfs_ball, generate_gnp, generate_gnpq
from cdrw.mixing import (
    GROWTH,
    INV_2E,
    MixingSearchConfig,
    candidate_sizes,
    deviation_scores,
    jitter_scores,
    largest_mixing_set,
    select_smallest,
    smallest_sum,
    tie_priority,
)
from cdrw.walk import ProbVector, walk

from conftest import complete, cycle, dense_transition


def test_constants():
    assert INV_2E == pytest.approx(0.183939720585721)
    assert GROWTH == pytest.approx(1.045985)
    cfg = MixingSearchConfig()
    assert cfg.start_size(1024) == 10 and cfg.start_size(1000) == 10


@pytest.mark.parametrize("kw", [{"epsilon_threshold": 0}, {"epsilon_threshold": 1}, {"growth_factor": 1.0},
                                {"initial_size": 0}, {"tie_break_scale": 1.0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        MixingSearchConfig(**kw)


def test_scores_regular_uniform_set():
    g = cycle(12)
    members = [0, 1, 2, 3, 4]
    p = np.zeros(12)
    p[members] = 1 / 5
    x = deviation_scores(g, p, 5)
    assert np.allclose(x[members], 0.0, atol=1e-15)


def test_scores_k4_delta():
    x = deviation_scores(complete(4), ProbVector.delta(4, 0), 1)
    assert x.tolist() == [0.0, 1.0, 1.0, 1.0]


def test_scores_reject_edgeless_and_bad_size():
    from cdrw.graph import Graph
    with pytest.raises(ValueError):
        deviation_scores(Graph.from_edges(3, []), np.ones(3) / 3, 1)
    with pytest.raises(ValueError):
        deviation_scores(complete(3), np.ones(3) / 3, 0)


def test_scores_match_oracle_distribution():
    g, _ = generate_gnpq(PpmParams(64, 2, 0.5, 0.02, seed=3))
    x0 = np.zeros(g.n)
    x0[0] = 1.0
    p4 = np.linalg.matrix_power(dense_transition(g), 4) @ x0
    deg = np.array([len(a) for a in g.adjacency()], dtype=float)
    expected = np.abs(p4 - deg / (deg.sum() / g.n * 64))
    assert np.max(np.abs(deviation_scores(g, walk(g, 0, 4), 64) - expected)) < 1e-10


def test_scores_relabeling_invariant():
    g = generate_gnp(40, 0.2, seed=6)
    perm = np.random.default_rng(0).permutation(40)
    from cdrw.graph import Graph
    h = Graph.from_edges(40, perm[g.edges])
    p = walk(g, 0, 3).values
    q = np.empty_like(p)
    q[perm] = p
    assert np.allclose(deviation_scores(h, q, 7)[perm], deviation_scores(g, p, 7), atol=1e-15)


def test_select_smallest_examples():
    members, total = select_smallest(np.array([0.5, 0.1, 0.3, 0.2]), 2)
    assert members.tolist() == [1, 3] and total == pytest.approx(0.3)
    s = np.array([0.4, 0.2, 0.9])
    members, total = select_smallest(s, 3)
    assert members.tolist() == [0, 1, 2] and total == pytest.approx(1.5)
    with pytest.raises(ValueError):
        select_smallest(s, 4)


def test_select_smallest_sort_oracle():
    rng = np.random.default_rng(1)
    scores = rng.random(1000)
    members, total = select_smallest(scores, 137)
    oracle = np.sort(scores)[:137]
    assert total == math.fsum(oracle)
    assert set(members.tolist()) == set(np.argsort(scores)[:137].tolist())
    assert smallest_sum(scores, 137) == total


def test_ties_follow_priority():
    scores = np.array([0.2, 0.1, 0.2, 0.2, 0.3])
    prio = np.array([0.9, 0.5, 0.1, 0.4, 0.0])
    members, _ = select_smallest(scores, 3, prio)
    assert members.tolist() == [1, 2, 3]
    # the jittered values order the same way
    keys = jitter_scores(scores, prio)
    assert set(np.argsort(keys)[:3].tolist()) == {1, 2, 3}


def test_jitter_keeps_distinct_order():
    rng = np.random.default_rng(2)
    scores = np.round(rng.random(500), 2)
    keys = jitter_scores(scores, tie_priority(500, 3))
    assert np.all(np.diff(scores[np.argsort(keys, kind="stable")]) >= 0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=60))
def test_select_sum_monotone_in_k(values):
    scores = np.array(values)
    sums = [select_smallest(scores, k)[1] for k in range(scores.size + 1)]
    assert all(a <= b for a, b in zip(sums, sums[1:]))
    assert sums[-1] == math.fsum(values)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5000), st.floats(1.001, 2.0))
def test_schedule_validity(n, growth):
    cfg = MixingSearchConfig(growth_factor=growth)
    sizes = candidate_sizes(n, cfg)
    assert sizes[0] == cfg.start_size(n) and sizes[-1] == n
    for a, b in zip(sizes, sizes[1:]):
        assert b - a >= 1
        assert b <= math.ceil(a * growth) + 1


def test_schedule_default_length_logarithmic():
    sizes = candidate_sizes(1024, MixingSearchConfig())
    assert len(sizes) < 8 * math.e * math.log(1024)


def test_complete_graph_mixes_over_everything():
    g = complete(8)
    for ell in (2, 3, 5):
        p = walk(g, 0, ell)
        res = largest_mixing_set(g, p)
        assert res is not None and res.size == 8 and res.step == ell
        # direct check of the condition at every size of the schedule
        passing = []
        for k in candidate_sizes(8, MixingSearchConfig()):
            x = np.abs(p.values - g.degrees / (2 * g.m / 8 * k))
            if math.fsum(np.sort(x)[:k]) < INV_2E:
                passing.append(k)
        assert max(passing) == res.size


def test_delta_distribution_does_not_mix():
    g = complete(8)
    assert largest_mixing_set(g, ProbVector.delta(8, 0), MixingSearchConfig(initial_size=2)) is None


def test_result_invariants_by_recomputation():
    g, _ = generate_gnpq(PpmParams(64, 2, 0.3, 0.01, seed=5))
    cfg = MixingSearchConfig()
    for ell in range(1, 12):
        p = walk(g, 0, ell)
        res = largest_mixing_set(g, p, cfg)
        passing = [k for k in candidate_sizes(g.n, cfg)
                   if smallest_sum(deviation_scores(g, p, k), k) < cfg.epsilon_threshold]
        if res is None:
            assert passing == []
        else:
            assert res.size == max(passing) == len(res.members)
            assert res.score_sum < cfg.epsilon_threshold


def test_restricted_candidates():
    g = generate_gnp(200, 0.05, seed=3)
    p = walk(g, 0, 3)
    ball = bfs_ball(g, 0, 3)
    res = largest_mixing_set(g, p, candidates=ball)
    if res is not None:
        assert set(res.members.tolist()) <= set(ball.tolist())


def test_regular_graph_restricted_stationary_scores_zero():
    g = cycle(20)
    s = np.arange(6)
    pi_s = np.zeros(20)
    pi_s[s] = g.degrees[s] / g.degrees[s].sum()
    assert np.allclose(deviation_scores(g, pi_s, 6)[s], 0.0, atol=1e-15)


@pytest.mark.xfail(strict=True, reason="below mixing time the schedule rarely passes; see decisions ledger")
def test_gnp_mixing_set_near_ball_at_length_four():
    n = 1024
    hits = 0
    for seed in range(10):
        g = generate_gnp(n, 2 * math.log2(n) / n, seed)
        res = largest_mixing_set(g, walk(g, 0, 4))
        lo, hi = len(bfs_ball(g, 0, 1)), len(bfs_ball(g, 0, 3))
        hits += res is not None and lo <= res.size <= hi
    assert hits >= 6
