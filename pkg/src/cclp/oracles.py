"""Exact optimum by subset DP, the Pivot baseline, and evaluation metrics."""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .graph import Clustering, SignedGraph, disagreements
from .kernels import partition_dp, subset_cost2_table

MAX_ORACLE_N = 16


def brute_force_opt(g: SignedGraph, backend: str | None = None) -> tuple[Clustering, int]:
    """Minimum-disagreement clustering; ties go to the lexicographically
    smallest partition (sorted clusters listed by minimum element)."""
    n = g.n
    if n > MAX_ORACLE_N:
        raise ValueError(f"exact oracle supports n <= {MAX_ORACLE_N}, got {n}")
    if n == 0:
        return Clustering(()), 0
    cost2 = subset_cost2_table(g.deg - 1, g.nbr_masks(range(n)), backend=backend)
    best, choice = partition_dp(cost2, backend=backend)
    full = (1 << n) - 1
    clusters = []
    mask = full
    while mask:
        c = int(choice[mask])
        clusters.append(tuple(v for v in range(n) if (c >> v) & 1))
        mask ^= c
    return Clustering(tuple(clusters)), int(best[full]) // 2


def pivot_baseline(g: SignedGraph, seed: int = 0) -> Clustering:
    """Classic Pivot: a uniform pivot takes all remaining +neighbors."""
    rng = np.random.default_rng(seed)
    alive = np.ones(g.n, dtype=bool)
    label = np.full(g.n, -1, dtype=np.int64)
    nxt = 0
    while alive.any():
        remaining = np.flatnonzero(alive)
        u = int(remaining[rng.integers(len(remaining))])
        members = np.flatnonzero(alive & g.adj[u])
        label[members] = nxt
        alive[members] = False
        nxt += 1
    return Clustering.from_assignment(label)


def evaluate(g: SignedGraph, c: Clustering, reference: float | None = None) -> dict:
    """Disagreements, cluster-size histogram and the ratio to ``reference``."""
    cost = disagreements(g, c)
    sizes = Counter(len(cl) for cl in c.clusters)
    rec = {
        "disagreements": cost,
        "clusters": len(c),
        "size_histogram": {str(k): sizes[k] for k in sorted(sizes)},
    }
    if reference is not None:
        if reference == 0:
            rec["ratio"] = 1.0 if cost == 0 else math.inf
            if cost:
                rec["flag"] = "ref-zero"
        else:
            rec["ratio"] = cost / reference
    return rec
