"""Atoms and admissible pairs, plus validators for both similarity conditions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import Clustering, SignedGraph


@dataclass(frozen=True)
class PreclusteredInstance:
    """Atoms (disjoint, size >= 2) and symmetric admissible pairs.

    An admissible pair always has an endpoint outside every atom. A vertex
    outside all atoms forms the singleton atom ``K(v) = (v,)``.
    """

    n: int
    atoms: tuple[tuple[int, ...], ...]
    adm: frozenset = frozenset()
    atom_of: np.ndarray = field(init=False, repr=False, compare=False)
    nadm: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        atoms = tuple(sorted(tuple(sorted(int(v) for v in a)) for a in self.atoms))
        atom_of = np.full(self.n, -1, dtype=np.int64)
        for i, a in enumerate(atoms):
            if len(a) < 2:
                raise ValueError(f"atom {a} has fewer than two vertices")
            for v in a:
                if not 0 <= v < self.n:
                    raise ValueError(f"atom vertex {v} out of range")
                if atom_of[v] >= 0:
                    raise ValueError(f"vertex {v} lies in two atoms")
                atom_of[v] = i
        pairs = set()
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.adm:
            u, v = int(min(u, v)), int(max(u, v))
            if u == v or not (0 <= u and v < self.n):
                raise ValueError(f"bad admissible pair ({u}, {v})")
            if atom_of[u] >= 0 and atom_of[v] >= 0:
                raise ValueError(f"admissible pair ({u}, {v}) joins two atom vertices")
            pairs.add((u, v))
            nbrs[u].add(v)
            nbrs[v].add(u)
        atom_of.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "adm", frozenset(pairs))
        object.__setattr__(self, "atom_of", atom_of)
        object.__setattr__(self, "nadm", tuple(tuple(sorted(s)) for s in nbrs))

    def K(self, v: int) -> tuple[int, ...]:
        a = self.atom_of[v]
        return self.atoms[a] if a >= 0 else (int(v),)

    def in_atom(self, v: int) -> bool:
        return bool(self.atom_of[v] >= 0)

    def d_adm(self, v: int) -> int:
        return len(self.nadm[v])

    def is_admissible(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.adm

    def units(self) -> list[tuple[int, ...]]:
        """All atoms including singletons, ordered by minimum vertex."""
        out = list(self.atoms) + [(v,) for v in range(self.n) if self.atom_of[v] < 0]
        return sorted(out)

    def atom_clustering(self) -> Clustering:
        return Clustering(tuple(self.units()))


@dataclass
class SimilarityReport:
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _degree_similar(d: np.ndarray, eps: float) -> np.ndarray:
    lo = eps * d[:, None] <= d[None, :]
    hi = d[None, :] <= d[:, None] / eps
    return lo & hi


def _common_similar(g: SignedGraph, eps: float) -> np.ndarray:
    """Count of common +neighbors degree-similar to both endpoints, per pair."""
    sim = _degree_similar(g.deg.astype(float), eps)
    b = (g.adj & sim).astype(np.int64)
    return b @ b.T


def _atom_ok(g: SignedGraph, atom: Sequence[int], eps: float, c1: float, c2: float) -> bool:
    idx = np.asarray(atom, dtype=np.int64)
    inside = g.adj[np.ix_(idx, idx)].sum(axis=1)
    outside = g.deg[idx] - inside
    k = len(idx)
    return bool(np.all(inside >= (1 - c1 * eps) * k) and np.all(outside <= c2 * eps * k))


def _find_atoms(g: SignedGraph, eps: float, c1: float, c2: float) -> list[tuple[int, ...]]:
    n = g.n
    adj = g.adj.astype(np.int64)
    common = adj @ adj.T
    deg = g.deg
    symdiff = deg[:, None] + deg[None, :] - 2 * common
    agree = g.adj & (symdiff < eps * np.maximum(deg[:, None], deg[None, :]))
    np.fill_diagonal(agree, False)
    heavy = (deg > 1) & (agree.sum(axis=1) >= (1 - eps) * (deg - 1))
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    us, vs = np.nonzero(np.triu(agree, k=1))
    for u, v in zip(us.tolist(), vs.tolist()):
        if heavy[u] and heavy[v]:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
    comps: dict[int, list[int]] = {}
    for v in range(n):
        if heavy[v]:
            comps.setdefault(find(v), []).append(v)
    return [tuple(c) for c in comps.values() if len(c) >= 2 and _atom_ok(g, c, eps, c1, c2)]


def build_preclustering(g: SignedGraph, eps: float, c1: float = 4.0, c2: float = 4.0,
                        seed: int = 0) -> PreclusteredInstance:
    """Agreement-based atoms plus degree-similar admissible pairs.

    Deterministic; ``seed`` is accepted for interface symmetry.
    """
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    atoms = _find_atoms(g, eps, c1, c2)
    in_atom = np.zeros(g.n, dtype=bool)
    for a in atoms:
        in_atom[list(a)] = True
    common = _common_similar(g, eps)
    deg = g.deg.astype(float)
    ok = _degree_similar(deg, eps)
    ok &= common >= eps * np.minimum(deg[:, None], deg[None, :])
    ok &= ~(in_atom[:, None] & in_atom[None, :])
    np.fill_diagonal(ok, False)
    ok = np.triu(ok, k=1)
    us, vs = np.nonzero(ok)
    strength = {(u, v): int(common[u, v]) for u, v in zip(us.tolist(), vs.tolist())}

    # prune weakest pairs where d_adm(v) exceeds 2 eps^-3 d(v)
    cap = 2 * eps ** -3 * deg
    nbrs: list[set[int]] = [set() for _ in range(g.n)]
    for u, v in strength:
        nbrs[u].add(v)
        nbrs[v].add(u)
    for v in range(g.n):
        if len(nbrs[v]) > cap[v]:
            ranked = sorted(nbrs[v], key=lambda u: (strength[(min(u, v), max(u, v))], u))
            for u in ranked[: len(nbrs[v]) - int(cap[v])]:
                nbrs[v].discard(u)
                nbrs[u].discard(v)
                strength.pop((min(u, v), max(u, v)), None)
    return PreclusteredInstance(g.n, tuple(atoms), frozenset(strength))


def verify_similar(inst: PreclusteredInstance, g: SignedGraph, eps: float,
                   c1: float = 4.0, c2: float = 4.0) -> SimilarityReport:
    """Check the admissible-degree bound, the pair conditions and atom density."""
    rep = SimilarityReport()
    deg = g.deg
    for v in range(g.n):
        if inst.d_adm(v) > 2 * eps ** -3 * deg[v]:
            rep.violations.append({"condition": "d_adm", "vertex": v})
    if inst.adm:
        common = _common_similar(g, eps)
    for u, v in sorted(inst.adm):
        du, dv = deg[u], deg[v]
        if du > 2 * dv / eps or dv > 2 * du / eps:
            rep.violations.append({"condition": "degree", "pair": [u, v]})
        if common[u, v] < eps * min(du, dv):
            rep.violations.append({"condition": "common", "pair": [u, v]})
    for a in inst.atoms:
        if not _atom_ok(g, a, eps, c1, c2):
            rep.violations.append({"condition": "atom", "atom": list(a)})
    return rep


def verify_large(c: Clustering, inst: PreclusteredInstance, g: SignedGraph,
                 eps: float) -> tuple[bool, list[dict]]:
    """Whether ``c`` keeps atoms whole, uses only admissible or atomic pairs,
    and has every non-singleton cluster at least ``eps * d(v)`` large."""
    bad: list[dict] = []
    lab = c.assignment()
    for a in inst.atoms:
        if len({int(lab[v]) for v in a}) > 1:
            bad.append({"condition": "split", "atom": list(a)})
    for cl in c.clusters:
        for i, u in enumerate(cl):
            for v in cl[i + 1:]:
                same = inst.in_atom(u) and inst.atom_of[u] == inst.atom_of[v]
                if not same and not inst.is_admissible(u, v):
                    bad.append({"condition": "non-admissible", "pair": [u, v]})
        if len(cl) > 1:
            for v in cl:
                if len(cl) < eps * g.deg[v]:
                    bad.append({"condition": "size", "cluster": list(cl), "vertex": v})
    return not bad, bad


def candidate_set(inst: PreclusteredInstance, r: int) -> tuple[int, ...]:
    """Vertices that may share a cluster rooted at ``r``.

    Singleton root: admissible partners outside atoms (the root itself is not
    included). Atom root: the atom plus partners admissible to every member.
    """
    if not inst.in_atom(r):
        return tuple(u for u in inst.nadm[r] if not inst.in_atom(u))
    K = inst.K(r)
    common = set(inst.nadm[K[0]])
    for u in K[1:]:
        common &= set(inst.nadm[u])
    return tuple(sorted(set(K) | common))


def d_set(inst: PreclusteredInstance, r: int) -> tuple[int, ...]:
    """Candidates of ``r`` outside its own atom."""
    K = set(inst.K(r))
    return tuple(u for u in candidate_set(inst, r) if u not in K)
