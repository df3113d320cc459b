import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cclp import Clustering, QueryCounter, SignedGraph, cluster_cost2, disagreements, generate, pos_degree
from cclp.oracles import brute_force_opt
from helpers import naive_cost, naive_disagreements, random_graph


@st.composite
def graphs_and_labels(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return SignedGraph(n, edges), labels


def test_pos_degree_examples(graphs):
    assert pos_degree(graphs["tri4"], 0) == 3
    assert pos_degree(graphs["tri4"], 3) == 1
    assert pos_degree(graphs["path3"], 1) == 3


def test_pos_degree_rejects_out_of_range(graphs):
    with pytest.raises(ValueError):
        pos_degree(graphs["tri4"], 4)


def test_cluster_cost2_examples(graphs):
    assert cluster_cost2(graphs["tri4"], [0, 1, 2]) == 0
    assert cluster_cost2(graphs["tri4"], [0, 1]) == 2
    assert cluster_cost2(graphs["tri_tail"], [0, 1, 2]) == 1


def test_cluster_cost2_rejects_empty(graphs):
    with pytest.raises(ValueError):
        cluster_cost2(graphs["tri4"], [])


def test_disagreement_examples(graphs):
    assert disagreements(graphs["tri4"], Clustering(((0, 1, 2), (3,)))) == 0
    assert disagreements(graphs["tri4"], Clustering.singletons(4)) == 3
    assert disagreements(graphs["tri_tail"], Clustering(((0, 1, 2), (3,)))) == 1


def test_generate_examples(graphs):
    assert generate("clique-union", sizes=[3, 3]) == graphs["two_tri"]
    g = generate("planted", seed=7, n=12, k=3, p_intra=1.0, p_flip=0.0)
    assert g == generate("clique-union", sizes=[4, 4, 4])
    assert brute_force_opt(g)[1] == 0
    assert generate("path", n=3) == graphs["path3"]


def test_generate_is_deterministic_and_validates():
    a = generate("planted", seed=3, n=20, k=4, p_flip=0.1)
    b = generate("planted", seed=3, n=20, k=4, p_flip=0.1)
    assert a == b and hash(a) == hash(b)
    with pytest.raises(ValueError):
        generate("planted", n=3, k=5)
    with pytest.raises(ValueError):
        generate("random", n=4, p=1.5)
    with pytest.raises(ValueError):
        generate("nope")


def test_graph_structure_invariants():
    g = random_graph(np.random.default_rng(0), 15)
    assert all(g.adj[v, v] for v in range(g.n))
    assert np.array_equal(g.adj, g.adj.T)
    assert int(g.deg.sum()) == 2 * g.m + g.n
    for v in range(g.n):
        assert v in g.pos_adj(v).tolist()
        assert list(g.pos_adj(v)) == sorted(g.pos_adj(v))
    with pytest.raises(ValueError):
        g.adj[0, 1] = True


@given(graphs_and_labels())
@settings(max_examples=150, deadline=None)
def test_disagreements_equal_half_sum_of_cluster_costs(data):
    g, labels = data
    c = Clustering.from_assignment(labels)
    assert 2 * disagreements(g, c) == sum(cluster_cost2(g, S) for S in c.clusters)
    assert disagreements(g, c) == naive_disagreements(g, c.clusters)


@given(graphs_and_labels())
@settings(max_examples=150, deadline=None)
def test_cluster_cost_matches_pair_enumeration(data):
    g, labels = data
    S = [v for v in range(g.n) if labels[v] % 2 == 0] or [0]
    assert cluster_cost2(g, S) == 2 * naive_cost(g, S)


def test_clustering_validation():
    with pytest.raises(ValueError):
        Clustering(((0, 1), (1, 2)))
    with pytest.raises(ValueError):
        Clustering(((0,), (2,)))
    c = Clustering(((2, 1), (0,)))
    assert c.clusters == ((0,), (1, 2))


def test_query_counter_is_monotone_until_reset():
    g = random_graph(np.random.default_rng(1), 6)
    qc = g.counter
    before = qc.total
    g.degree(0)
    g.neighbor(0, 0)
    g.edge(0, 1)
    assert qc.snapshot() == {"degree": 1, "neighbor": 1, "edge": 1}
    assert qc.total == before + 3
    qc.reset()
    assert qc.total == 0
    assert isinstance(QueryCounter().snapshot(), dict)
