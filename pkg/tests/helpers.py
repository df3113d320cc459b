"""Independent reference implementations and shared test graphs."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from cclp import SignedGraph, generate


def named_graphs() -> dict[str, SignedGraph]:
    return {
        "tri4": SignedGraph(4, [(0, 1), (0, 2), (1, 2)]),
        "path3": generate("path", n=3),
        "tri_tail": SignedGraph(4, [(0, 1), (0, 2), (1, 2), (2, 3)]),
        "two_tri": generate("clique-union", sizes=[3, 3]),
        "two_tri_bridge": SignedGraph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 5)]),
        "k3": generate("clique-union", sizes=[3]),
        "empty5": SignedGraph(5, []),
    }


def naive_cost(g: SignedGraph, S) -> Fraction:
    """cost(S) by pair enumeration: half of each cut +edge, every inner -edge."""
    S = set(S)
    total = Fraction(0)
    for u in S:
        for v in range(g.n):
            if v == u:
                continue
            if v in S:
                if u < v and not g.adj[u, v]:
                    total += 1
            elif g.adj[u, v]:
                total += Fraction(1, 2)
    return total


def naive_cost_or_zero(g, S) -> Fraction:
    return naive_cost(g, S) if S else Fraction(0)


def naive_disagreements(g: SignedGraph, clusters) -> int:
    lab = {}
    for i, c in enumerate(clusters):
        for v in c:
            lab[v] = i
    bad = 0
    for u in range(g.n):
        for v in range(u + 1, g.n):
            same = lab[u] == lab[v]
            if g.adj[u, v] != same:
                bad += 1
    return bad


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def canonical(part) -> tuple:
    return tuple(sorted(tuple(sorted(c)) for c in part))


def enumerate_opt(g: SignedGraph):
    """Minimum disagreements and the lexicographically least optimal partition."""
    best = None
    for part in set_partitions(range(g.n)):
        key = (naive_disagreements(g, part), canonical(part))
        if best is None or key < best:
            best = key
    return best[1], best[0]


def random_graph(rng: np.random.Generator, n: int, p: float | None = None) -> SignedGraph:
    p = rng.uniform(0.1, 0.9) if p is None else p
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return SignedGraph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def two_vertex_gadget():
    from cclp import FractionalClusterSolution
    return FractionalClusterSolution(2, 2, [((0, 1), 1), ((0,), 1), ((1,), 1)])


def absorbing_together_probability(entries, u, v) -> Fraction:
    """Exact probability that sequential cluster rounding puts u and v together.

    Recursion over the set of remaining vertices, with draws restricted to
    sets meeting it.
    """
    from functools import lru_cache
    sets = [(frozenset(S), Fraction(k)) for S, k in entries]

    @lru_cache(maxsize=None)
    def go(remaining: frozenset) -> Fraction:
        if u not in remaining or v not in remaining:
            return Fraction(0)
        live = [(S, k) for S, k in sets if S & remaining]
        total = sum(k for _, k in live)
        out = Fraction(0)
        for S, k in live:
            part = S & remaining
            if u in part and v in part:
                out += k / total
            elif u in part or v in part:
                continue
            else:
                out += k / total * go(remaining - part)
        return out

    return go(frozenset(itertools.chain.from_iterable(S for S, _ in entries)))


def opt_with_cluster(g: SignedGraph, K) -> int:
    """Least disagreements over clusterings that contain ``K`` as a cluster."""
    from cclp.oracles import brute_force_opt
    K = sorted(set(K))
    rest = [v for v in range(g.n) if v not in K]
    inside_neg = sum(1 for i, u in enumerate(K) for v in K[i + 1:] if not g.adj[u, v])
    leaving = int(g.adj[np.ix_(K, rest)].sum()) if rest else 0
    if not rest:
        return inside_neg
    sub = SignedGraph.from_matrix(g.adj[np.ix_(rest, rest)])
    return inside_neg + leaving + brute_force_opt(sub)[1]
