"""Rounding a feasible cluster-LP solution into a clustering."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cover import FractionalClusterSolution
from .graph import Clustering, SignedGraph

log = logging.getLogger(__name__)

MIX_P = 1.485 / 2
_MIX_STREAM = 0x6D6978


def _require_feasible(z: FractionalClusterSolution) -> None:
    v = z.infeasible_vertex()
    if v is not None:
        raise ValueError(f"solution is not cluster-LP feasible at vertex {v}")


def cluster_rounding(z: FractionalClusterSolution, seed: int = 0) -> Clustering:
    """Draw sets proportional to ``z`` among those still meeting the remaining
    vertices, and emit each draw's remaining part as a cluster."""
    _require_feasible(z)
    rng = np.random.default_rng(seed)
    sets = [np.asarray(S, dtype=np.int64) for S, _ in z.entries]
    weight = np.array([k for _, k in z.entries], dtype=np.float64)
    left = np.array([len(S) for S, _ in z.entries], dtype=np.int64)
    alive = np.ones(z.n, dtype=bool)
    label = np.full(z.n, -1, dtype=np.int64)
    inc = z.incidence
    nxt = 0
    while alive.any():
        live = left > 0
        w = np.where(live, weight, 0.0)
        cum = np.cumsum(w)
        i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        i = min(i, len(cum) - 1)
        while not live[i]:
            i -= 1
        members = sets[i][alive[sets[i]]]
        label[members] = nxt
        nxt += 1
        alive[members] = False
        for v in members.tolist():
            for j in inc[v]:
                left[j] -= 1
    return Clustering.from_assignment(label)


def clock_labels(z: FractionalClusterSolution, rng: np.random.Generator,
                 c: int = 3) -> tuple[np.ndarray, bool]:
    """Integer clocks ``floor(n^c / z_S * ln(1 / p_S))``; each vertex takes its
    smallest clock. Sets tied at some vertex's minimum are merged; ties
    between sets sharing no such vertex are harmless. Returns labels and
    whether a merge happened."""
    n, den = z.n, z.denominator
    ks = np.array([k for _, k in z.entries], dtype=np.float64)
    p = 1.0 - rng.random(len(ks))
    clocks = np.floor(float(n) ** c * den / ks * -np.log(p)).astype(np.int64)
    best = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    owner = np.full(n, -1, dtype=np.int64)
    for i, (S, _) in enumerate(z.entries):
        idx = np.asarray(S, dtype=np.int64)
        better = clocks[i] < best[idx]
        best[idx[better]] = clocks[i]
        owner[idx[better]] = i
    parent = list(range(len(ks)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    tie = False
    for i, (S, _) in enumerate(z.entries):
        idx = np.asarray(S, dtype=np.int64)
        for v in idx[(best[idx] == clocks[i]) & (owner[idx] != i)].tolist():
            a, b = find(i), find(int(owner[v]))
            if a != b:
                parent[a] = b
                tie = True
    labels = np.array([find(int(o)) for o in owner], dtype=np.int64)
    return labels, tie


def cluster_rounding_clocks(z: FractionalClusterSolution, seed: int = 0, c: int = 3,
                            return_ties: bool = False):
    """Exponential-clock version of :func:`cluster_rounding`.

    Each vertex joins the set with its smallest clock; sets tied at a
    shared vertex are merged.
    """
    _require_feasible(z)
    labels, tie = clock_labels(z, np.random.default_rng(seed), c)
    if tie:
        log.warning("clock tie at a shared vertex; merged the tied sets")
    out = Clustering.from_assignment(labels)
    return (out, tie) if return_ties else out


@dataclass
class PivotStats:
    rounds: int = 0
    accesses: int = 0
    per_round: list[int] = field(default_factory=list)


def pivot_rounding(z: FractionalClusterSolution, g: SignedGraph, seed: int = 0,
                   stats: PivotStats | None = None) -> Clustering:
    """Pivot rounding with a correlated rule for mid-range +edges.

    Only vertices sharing a support set with the pivot are examined; every
    other pair has separation 1 and never joins.
    """
    _require_feasible(z)
    if g.n != z.n:
        raise ValueError("graph and solution sizes differ")
    rng = np.random.default_rng(seed)
    den = z.denominator
    inc = z.incidence
    entries = z.entries
    alive = np.ones(z.n, dtype=bool)
    label = np.full(z.n, -1, dtype=np.int64)
    nxt = 0
    stats = stats if stats is not None else PivotStats()
    while alive.any():
        remaining = np.flatnonzero(alive)
        u = int(remaining[rng.integers(len(remaining))])
        together: dict[int, int] = {}
        for i in inc[u]:
            S, k = entries[i]
            for v in S:
                if v != u and alive[v]:
                    together[v] = together.get(v, 0) + k
        stats.rounds += 1
        stats.accesses += len(together) + 1
        stats.per_round.append(len(together) + 1)
        ks = np.array([entries[i][1] for i in inc[u]], dtype=np.float64)
        pick = int(np.searchsorted(np.cumsum(ks), rng.random() * ks.sum(), side="right"))
        chosen = set(entries[inc[u][min(pick, len(ks) - 1)]][0])
        cluster = [u]
        for v in sorted(together):
            gap = den - together[v]
            x = gap / den
            if not g.adj[u, v]:
                if rng.random() < 1 - x * x:
                    cluster.append(v)
            elif 5 * gap <= 2 * den:
                cluster.append(v)
            elif 100 * gap <= 57 * den:
                if v in chosen:
                    cluster.append(v)
            elif rng.random() < 1 - x:
                cluster.append(v)
        label[cluster] = nxt
        alive[cluster] = False
        nxt += 1
    return Clustering.from_assignment(label)


def round_mixed(z: FractionalClusterSolution, g: SignedGraph, seed: int = 0,
                p_mix: float = MIX_P, assign: str = "pivot", c: int = 3,
                return_branch: bool = False):
    """Run the ``assign`` scheme with probability ``p_mix`` and the other one
    otherwise. The cluster branch uses exponential clocks."""
    if not 0.0 <= p_mix <= 1.0:
        raise ValueError("p_mix must lie in [0, 1]")
    if assign not in ("pivot", "cluster"):
        raise ValueError("assign must be 'pivot' or 'cluster'")
    coin = np.random.default_rng([seed, _MIX_STREAM]).random() < p_mix
    other = "cluster" if assign == "pivot" else "pivot"
    branch = assign if coin else other
    if branch == "pivot":
        out = pivot_rounding(z, g, seed)
    else:
        out = cluster_rounding_clocks(z, seed, c)
    return (out, branch) if return_branch else out
