"""Complete signed graphs stored by their +edges, and disagreement costs.

Every vertex carries a +self-loop, so ``d(v)`` is at least one. Pairs that
are not +edges are -edges. Costs are kept doubled so that they stay integral.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class QueryCounter:
    """Counts degree, neighbor and pair queries made through the accessor."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.degree_queries = 0
        self.neighbor_queries = 0
        self.edge_queries = 0

    def add(self, degree: int = 0, neighbor: int = 0, edge: int = 0) -> None:
        with self._lock:
            self.degree_queries += degree
            self.neighbor_queries += neighbor
            self.edge_queries += edge

    def reset(self) -> None:
        with self._lock:
            self.degree_queries = self.neighbor_queries = self.edge_queries = 0

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "degree": self.degree_queries,
                "neighbor": self.neighbor_queries,
                "edge": self.edge_queries,
            }

    @property
    def total(self) -> int:
        return self.degree_queries + self.neighbor_queries + self.edge_queries


class SignedGraph:
    """Immutable complete signed graph on vertices ``0..n-1``.

    ``pos_adj(v)`` lists the +neighbors of ``v`` including ``v`` itself and
    ``is_pos(u, v)`` is a constant-time lookup in a dense boolean matrix.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                continue
            adj[u, v] = adj[v, u] = True
        self._init_from_matrix(adj)

    def _init_from_matrix(self, adj: np.ndarray) -> None:
        n = adj.shape[0]
        np.fill_diagonal(adj, True)
        adj.setflags(write=False)
        self.n = n
        self.adj = adj
        self.deg = adj.sum(axis=1).astype(np.int64)
        self.deg.setflags(write=False)
        self.m = int((self.deg.sum() - n) // 2)
        rows, cols = np.nonzero(adj)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.deg, out=self.indptr[1:])
        self.indices = cols.astype(np.int64)
        off = rows != cols
        self.nb_indices = cols[off].astype(np.int64)
        self.nb_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.deg - 1, out=self.nb_indptr[1:])
        self.counter = QueryCounter()

    @classmethod
    def from_matrix(cls, adj: np.ndarray) -> "SignedGraph":
        g = cls.__new__(cls)
        adj = np.array(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be a symmetric square matrix")
        g._init_from_matrix(adj)
        return g

    def __repr__(self) -> str:
        return f"SignedGraph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SignedGraph) and np.array_equal(self.adj, other.adj)

    def __hash__(self) -> int:
        return hash((self.n, self.adj.tobytes()))

    def pos_adj(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]: self.indptr[v + 1]]

    def is_pos(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self.adj, k=1))
        return list(zip(us.tolist(), vs.tolist()))

    def nbr_masks(self, vertices: Sequence[int]) -> np.ndarray:
        """+neighbor bitmasks among ``vertices`` (positions, self excluded)."""
        vs = np.asarray(vertices, dtype=np.int64)
        sub = self.adj[np.ix_(vs, vs)].copy()
        np.fill_diagonal(sub, False)
        weights = np.left_shift(np.int64(1), np.arange(len(vs), dtype=np.int64))
        return (sub * weights).sum(axis=1).astype(np.int64)

    # counted accessors used by the sampling estimators

    def degree(self, v: int) -> int:
        self.counter.add(degree=1)
        return int(self.deg[v])

    def neighbor(self, v: int, i: int) -> int:
        self.counter.add(neighbor=1)
        return int(self.indices[self.indptr[v] + i])

    def edge(self, u: int, v: int) -> bool:
        self.counter.add(edge=1)
        return bool(self.adj[u, v])


def pos_degree(g: SignedGraph, v: int) -> int:
    """+degree of ``v``, self-loop included."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    return int(g.deg[v])


def _as_index(S: Iterable[int]) -> np.ndarray:
    idx = np.unique(np.fromiter((int(v) for v in S), dtype=np.int64))
    if idx.size == 0:
        raise ValueError("cluster must be nonempty")
    return idx


def cluster_cost2(g: SignedGraph, S: Iterable[int]) -> int:
    """Doubled cost of cluster ``S``: |E+(S, V-S)| + 2|E-(S)|."""
    idx = _as_index(S)
    if idx[0] < 0 or idx[-1] >= g.n:
        raise ValueError("cluster vertex out of range")
    k = len(idx)
    inner = int(g.adj[np.ix_(idx, idx)].sum() - k) // 2
    crossing = int(g.deg[idx].sum() - k) - 2 * inner
    neg = k * (k - 1) // 2 - inner
    return crossing + 2 * neg


@dataclass(frozen=True)
class Clustering:
    """Partition of ``0..n-1``; clusters are sorted tuples ordered by minimum."""

    clusters: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        canon = tuple(sorted(tuple(sorted(int(v) for v in c)) for c in self.clusters if len(c)))
        object.__setattr__(self, "clusters", canon)
        seen = [v for c in canon for v in c]
        if len(seen) != len(set(seen)):
            raise ValueError("clusters overlap")
        if sorted(seen) != list(range(len(seen))):
            raise ValueError("clusters do not cover 0..n-1")

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.clusters)

    @classmethod
    def from_assignment(cls, labels: Sequence[int]) -> "Clustering":
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(v)
        return cls(tuple(tuple(c) for c in groups.values()))

    @classmethod
    def singletons(cls, n: int) -> "Clustering":
        return cls(tuple((v,) for v in range(n)))

    def assignment(self) -> np.ndarray:
        lab = np.empty(self.n, dtype=np.int64)
        for i, c in enumerate(self.clusters):
            lab[list(c)] = i
        return lab

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)


def disagreements(g: SignedGraph, c: Clustering) -> int:
    """+edges across clusters plus -edges inside clusters."""
    if c.n != g.n:
        raise ValueError("clustering does not cover the graph")
    lab = c.assignment()
    same = lab[:, None] == lab[None, :]
    off = ~np.eye(g.n, dtype=bool)
    cut = int((g.adj & ~same & off).sum()) // 2
    neg_in = int((~g.adj & same).sum()) // 2
    return cut + neg_in


# ---------------------------------------------------------------------------
# generators


def _planted(n: int, k: int, p_intra: float, p_flip: float, rng: np.random.Generator):
    if k < 1 or k > n:
        raise ValueError("need 1 <= k <= n")
    labels = np.repeat(np.arange(k), [n // k + (i < n % k) for i in range(k)])
    iu, ju = np.triu_indices(n, k=1)
    same = labels[iu] == labels[ju]
    pos = same & (rng.random(len(iu)) < p_intra)
    flip = rng.random(len(iu)) < p_flip
    pos ^= flip
    return zip(iu[pos].tolist(), ju[pos].tolist())


def generate(kind: str, seed: int = 0, **params) -> SignedGraph:
    """Deterministic test graphs.

    ``planted``: ``n, k, p_intra=1.0, p_flip=0.0``; ``random``: ``n, p``;
    ``path``: ``n``; ``clique-union``: ``sizes``.
    """
    rng = np.random.default_rng(seed)
    if kind == "planted":
        n = int(params["n"])
        edges = _planted(n, int(params["k"]), float(params.get("p_intra", 1.0)),
                         float(params.get("p_flip", 0.0)), rng)
        return SignedGraph(n, edges)
    if kind == "random":
        n = int(params["n"])
        p = float(params.get("p", 0.5))
        if n < 0 or not 0.0 <= p <= 1.0:
            raise ValueError("invalid random-graph parameters")
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(len(iu)) < p
        return SignedGraph(n, zip(iu[keep].tolist(), ju[keep].tolist()))
    if kind == "path":
        n = int(params["n"])
        if n < 1:
            raise ValueError("path needs n >= 1")
        return SignedGraph(n, ((i, i + 1) for i in range(n - 1)))
    if kind == "clique-union":
        sizes = [int(s) for s in params["sizes"]]
        if any(s < 1 for s in sizes):
            raise ValueError("clique sizes must be positive")
        edges = []
        start = 0
        for s in sizes:
            edges += [(start + i, start + j) for i in range(s) for j in range(i + 1, s)]
            start += s
        return SignedGraph(start, edges)
    raise ValueError(f"unknown graph kind {kind!r}")
