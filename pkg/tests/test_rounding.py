import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cclp import FractionalClusterSolution, SignedGraph, disagreements, generate
from cclp.mwu import preset, solve_cluster_lp
from cclp.rounding import (MIX_P, PivotStats, clock_labels, cluster_rounding,
                           cluster_rounding_clocks, pivot_rounding, round_mixed)
from helpers import absorbing_together_probability, two_vertex_gadget

QUALITY_SLACK = 0.10


def _partition_solution(n, labels, den=1):
    clusters = {}
    for v, c in enumerate(labels):
        clusters.setdefault(int(c), []).append(v)
    return FractionalClusterSolution(n, den, [(tuple(c), den) for c in clusters.values()])


def _canon(c):
    return sorted(c.clusters)


def _mixture(n, parts):
    entries = {}
    for labels in parts:
        for c in set(labels.tolist()):
            S = tuple(np.flatnonzero(labels == c).tolist())
            entries[S] = entries.get(S, 0) + 1
    return FractionalClusterSolution(n, len(parts), list(entries.items()))


def test_cluster_rounding_examples():
    z = FractionalClusterSolution(4, 1, [((0, 1), 1), ((2, 3), 1)])
    for seed in range(20):
        assert _canon(cluster_rounding(z, seed)) == [(0, 1), (2, 3)]
        assert _canon(cluster_rounding_clocks(z, seed)) == [(0, 1), (2, 3)]
    z = FractionalClusterSolution(4, 1, [((0, 1, 2, 3), 1)])
    assert _canon(cluster_rounding(z, 0)) == [(0, 1, 2, 3)]
    with pytest.raises(ValueError):
        cluster_rounding(FractionalClusterSolution(2, 2, [((0, 1), 1)]), 0)


def test_gadget_probability_matches_chain():
    z = two_vertex_gadget()
    exact = absorbing_together_probability(z.entries, 0, 1)
    assert exact == Fraction(1, 3)
    runs = 20000
    freq = sum(len(cluster_rounding(z, s)) == 1 for s in range(runs)) / runs
    se = math.sqrt(exact * (1 - exact) / runs)
    assert abs(freq - float(exact)) <= 4 * se


def test_chain_oracle_on_three_vertices():
    entries = [((0, 1, 2), 1), ((0, 1), 1), ((2,), 1), ((0,), 1), ((1, 2), 1)]
    z = FractionalClusterSolution(3, 3, entries)
    assert z.is_cluster_feasible()
    exact = absorbing_together_probability(entries, 0, 1)
    runs = 20000
    labels = (cluster_rounding(z, s).assignment() for s in range(runs))
    freq = sum(lab[0] == lab[1] for lab in labels) / runs
    assert abs(freq - float(exact)) <= 4 * math.sqrt(float(exact * (1 - exact)) / runs)


def test_clock_collisions_are_rare_at_hundred_vertices():
    rng = np.random.default_rng(0)
    z = _mixture(100, [rng.integers(0, 10, size=100) for _ in range(4)])
    ties = sum(clock_labels(z, np.random.default_rng(s), 3)[1] for s in range(2000))
    assert ties / 2000 < 1e-2


def test_clock_variant_converges_with_larger_exponent():
    # floor ties at n^c = 8 bias the two-vertex gadget; finer clocks remove it
    z = two_vertex_gadget()
    runs = 20000
    freq = sum(len(cluster_rounding_clocks(z, s, c=12)) == 1 for s in range(runs)) / runs
    assert abs(freq - 1 / 3) <= 4 * math.sqrt(2 / 9 / runs)


def test_pivot_examples():
    g = generate("clique-union", sizes=[2, 3])
    z = _partition_solution(5, [0, 0, 1, 1, 1])
    for seed in range(20):
        assert _canon(pivot_rounding(z, g, seed)) == [(0, 1), (2, 3, 4)]
    z = _partition_solution(5, range(5))
    assert _canon(pivot_rounding(z, g, 0)) == [(v,) for v in range(5)]
    with pytest.raises(ValueError):
        pivot_rounding(z, SignedGraph(4, []), 0)


def test_pivot_mid_range_is_correlated():
    g = SignedGraph(2, [(0, 1)])
    z = two_vertex_gadget()
    assert z.x(0, 1) == Fraction(1, 2)
    runs = 20000
    freq = sum(len(pivot_rounding(z, g, s)) == 1 for s in range(runs)) / runs
    assert abs(freq - 0.5) <= 4 * math.sqrt(0.25 / runs)


def test_pivot_threshold_rules():
    # x = 2/5 joins always; x = 3/5 joins with probability 2/5; a -pair at
    # x = 1/2 joins with probability 3/4
    g = SignedGraph(2, [(0, 1)])
    z = FractionalClusterSolution(2, 5, [((0, 1), 3), ((0,), 2), ((1,), 2)])
    assert all(len(pivot_rounding(z, g, s)) == 1 for s in range(200))
    z = FractionalClusterSolution(2, 5, [((0, 1), 2), ((0,), 3), ((1,), 3)])
    runs = 20000
    freq = sum(len(pivot_rounding(z, g, s)) == 1 for s in range(runs)) / runs
    assert abs(freq - 0.4) <= 4 * math.sqrt(0.24 / runs)
    z = two_vertex_gadget()
    freq = sum(len(pivot_rounding(z, SignedGraph(2, []), s)) == 1 for s in range(runs)) / runs
    assert abs(freq - 0.75) <= 4 * math.sqrt(0.1875 / runs)


def test_pivot_access_counting():
    g = generate("planted", seed=1, n=40, k=4, p_flip=0.1)
    res = solve_cluster_lp(g, preset("desk"), seed=0)
    z = res.solution
    stats = PivotStats()
    pivot_rounding(z, g, 3, stats)
    assert stats.rounds == len(stats.per_round) and stats.accesses == sum(stats.per_round)
    span = [set().union(*(set(z.entries[i][0]) for i in z.incidence[u])) for u in range(z.n)]
    assert max(stats.per_round) <= max(len(s) for s in span)
    assert stats.accesses <= z.n * z.denominator ** 2


def test_mixture_examples():
    g = generate("planted", seed=2, n=12, k=3, p_flip=0.1)
    z = solve_cluster_lp(g, preset("desk"), seed=0).solution
    for seed in range(10):
        assert round_mixed(z, g, seed, p_mix=1.0, assign="cluster") == cluster_rounding_clocks(z, seed)
        assert round_mixed(z, g, seed, p_mix=0.0, assign="cluster") == pivot_rounding(z, g, seed)
        assert round_mixed(z, g, seed, p_mix=1.0) == pivot_rounding(z, g, seed)
    runs = 10 ** 4
    hits = sum(round_mixed(z, g, s, return_branch=True)[1] == "pivot" for s in range(runs))
    assert abs(hits / runs - MIX_P) <= 0.015
    with pytest.raises(ValueError):
        round_mixed(z, g, 0, p_mix=1.5)
    with pytest.raises(ValueError):
        round_mixed(z, g, 0, assign="other")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_outputs_are_partitions_and_keep_sets_whole(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 20))
    blocks = rng.integers(0, max(1, n // 2), size=n)
    # every support set is a union of blocks: coarsen the blocks at random
    parts = [rng.integers(0, 3, size=int(blocks.max()) + 1)[blocks] for _ in range(4)]
    z = _mixture(n, parts)
    g = generate("random", seed=seed, n=n, p=0.5)
    for c in (cluster_rounding(z, seed), cluster_rounding_clocks(z, seed),
              pivot_rounding(z, g, seed), round_mixed(z, g, seed)):
        assert sorted(v for cl in c.clusters for v in cl) == list(range(n))
    for c in (cluster_rounding(z, seed), cluster_rounding_clocks(z, seed)):
        lab = c.assignment()
        for b in set(blocks.tolist()):
            members = np.flatnonzero(blocks == b)
            assert len(set(lab[members].tolist())) == 1


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_random_fractional_solutions_round_to_partitions(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 25))
    z = _mixture(n, [rng.integers(0, int(rng.integers(1, n + 1)), size=n) for _ in range(5)])
    g = generate("random", seed=seed, n=n, p=0.4)
    for c in (cluster_rounding(z, seed), cluster_rounding_clocks(z, seed), pivot_rounding(z, g, seed)):
        assert sorted(v for cl in c.clusters for v in cl) == list(range(n))


def test_integral_solutions_round_trip():
    rng = np.random.default_rng(4)
    for trial in range(100):
        n = int(rng.integers(1, 30))
        labels = rng.integers(0, int(rng.integers(1, n + 1)), size=n)
        z = _partition_solution(n, labels, den=int(rng.integers(1, 5)))
        g = generate("random", seed=trial, n=n, p=0.5)
        expect = sorted(tuple(np.flatnonzero(labels == c).tolist()) for c in set(labels.tolist()))
        assert _canon(cluster_rounding_clocks(z, trial)) == expect
        assert _canon(cluster_rounding(z, trial)) == expect
        assert _canon(pivot_rounding(z, g, trial)) == expect


def test_mixed_quality_against_lp_cost():
    for seed in range(6):
        g = generate("planted", seed=seed, n=12, k=3, p_flip=0.1)
        res = solve_cluster_lp(g, preset("desk"), seed=seed)
        for assign in ("pivot", "cluster"):
            mean = np.mean([disagreements(g, round_mixed(res.solution, g, s, assign=assign))
                            for s in range(200)])
            assert mean <= 1.485 * float(res.cost) * (1 + QUALITY_SLACK) + 1e-9
