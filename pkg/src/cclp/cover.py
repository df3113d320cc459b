"""Cross degrees, the covering objective, and covering-to-cluster conversion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .graph import SignedGraph, cluster_cost2
from .precluster import PreclusteredInstance

Vertices = tuple[int, ...]


@dataclass(frozen=True)
class CrossDegrees:
    """Per-vertex share of twice the cost of isolating its atom.

    ``zero_atoms`` lists atoms and isolated singletons with zero cross degree.
    """

    values: tuple[Fraction, ...]
    total: Fraction
    zero_atoms: tuple[Vertices, ...]

    def __getitem__(self, v: int) -> Fraction:
        return self.values[v]

    def of(self, S: Iterable[int]) -> Fraction:
        return sum((self.values[v] for v in S), Fraction(0))

    def doubled_int(self, v: int) -> int:
        """``2 d_cross(v)`` when it is integral (singletons), else raises."""
        val = 2 * self.values[v]
        if val.denominator != 1:
            raise ValueError(f"cross degree of {v} is not integral")
        return int(val)


def compute_d_cross(g: SignedGraph, inst: PreclusteredInstance) -> CrossDegrees:
    vals = [Fraction(int(g.deg[v]) - 1) for v in range(g.n)]
    zero = []
    for a in inst.atoms:
        c2 = cluster_cost2(g, a)
        share = Fraction(c2, len(a))
        for v in a:
            vals[v] = share
        if c2 == 0:
            zero.append(a)
    # an isolated singleton is a zero-cost atom as well
    zero += [(v,) for v in range(g.n) if not inst.in_atom(v) and g.deg[v] == 1]
    return CrossDegrees(tuple(vals), sum(vals, Fraction(0)), tuple(sorted(zero)))


def cover(g: SignedGraph, cd: CrossDegrees, S: Iterable[int]) -> Fraction:
    """cost(S) plus the cross degrees of its members."""
    S = tuple(S)
    return Fraction(cluster_cost2(g, S), 2) + cd.of(S)


def cover2(g: SignedGraph, cd: CrossDegrees, S: Iterable[int]) -> Fraction:
    """Doubled :func:`cover`."""
    return 2 * cover(g, cd, S)


@dataclass
class FractionalClusterSolution:
    """Sparse ``z`` with every value ``k_S / denominator`` for integer ``k_S``."""

    n: int
    denominator: int
    entries: list[tuple[Vertices, int]]
    _incidence: list[list[int]] | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.denominator < 1:
            raise ValueError("denominator must be positive")
        merged: dict[Vertices, int] = {}
        for S, k in self.entries:
            S = tuple(sorted(int(v) for v in S))
            if not S:
                raise ValueError("empty support set")
            if k < 0:
                raise ValueError("negative weight")
            if k:
                merged[S] = merged.get(S, 0) + int(k)
        self.entries = sorted(merged.items(), key=lambda e: (e[0][0], -len(e[0]), e[0]))

    @property
    def incidence(self) -> list[list[int]]:
        if self._incidence is None:
            inc: list[list[int]] = [[] for _ in range(self.n)]
            for i, (S, _) in enumerate(self.entries):
                for v in S:
                    inc[v].append(i)
            self._incidence = inc
        return self._incidence

    def value(self, S: Iterable[int]) -> Fraction:
        key = tuple(sorted(S))
        for T, k in self.entries:
            if T == key:
                return Fraction(k, self.denominator)
        return Fraction(0)

    def coverage_num(self, v: int) -> int:
        return sum(self.entries[i][1] for i in self.incidence[v])

    def coverage(self, v: int) -> Fraction:
        return Fraction(self.coverage_num(v), self.denominator)

    def x(self, u: int, v: int) -> Fraction:
        """Separation value ``1 - sum of z_S over S containing u and v``."""
        if u == v:
            return Fraction(0)
        together = sum(self.entries[i][1] for i in self.incidence[u] if v in self.entries[i][0])
        return 1 - Fraction(together, self.denominator)

    def is_cluster_feasible(self) -> bool:
        return all(self.coverage_num(v) == self.denominator for v in range(self.n))

    def infeasible_vertex(self) -> int | None:
        for v in range(self.n):
            if self.coverage_num(v) != self.denominator:
                return v
        return None

    def min_support(self) -> Fraction:
        return min(Fraction(k, self.denominator) for _, k in self.entries)

    def as_fractions(self) -> dict[Vertices, Fraction]:
        return {S: Fraction(k, self.denominator) for S, k in self.entries}

    @classmethod
    def from_partition(cls, n: int, clusters: Iterable[Iterable[int]],
                       denominator: int = 1) -> "FractionalClusterSolution":
        return cls(n, denominator, [(tuple(c), denominator) for c in clusters])


def solution_cost(g: SignedGraph, sol: FractionalClusterSolution) -> Fraction:
    """LP cost: sum of z_S cost(S)."""
    total = sum(k * cluster_cost2(g, S) for S, k in sol.entries)
    return Fraction(total, 2 * sol.denominator)


def weights_cover(g: SignedGraph, cd: CrossDegrees, z: Mapping[Vertices, Fraction]) -> Fraction:
    return sum((w * cover(g, cd, S) for S, w in z.items()), Fraction(0))


def _check_atoms(S: Vertices, inst: PreclusteredInstance) -> None:
    members = set(S)
    for v in S:
        if not members.issuperset(inst.K(v)):
            raise ValueError(f"set {S} splits the atom of vertex {v}")


def convert_cover_to_cluster(z: Mapping[Iterable[int], Fraction], inst: PreclusteredInstance,
                             t_mw: int, gamma: Fraction) -> FractionalClusterSolution:
    """Turn a covering solution into an exact cluster-LP solution.

    Values are clamped at 1 and rounded up to the grid ``1 / (c t_mw)`` with
    ``c = ceil(1 / gamma)``; then over-covered atoms shed weight by moving it
    from a set ``W`` to ``W`` minus that atom until every coverage is exact.
    """
    gamma = Fraction(gamma)
    c = math.ceil(1 / gamma)
    den = c * t_mw
    merged: dict[Vertices, Fraction] = {}
    for S, w in z.items():
        S = tuple(sorted(int(v) for v in S))
        w = Fraction(w)
        if w > 0:
            _check_atoms(S, inst)
            merged[S] = merged.get(S, Fraction(0)) + w
    k = {S: math.ceil(min(w, Fraction(1)) * den) for S, w in merged.items()}

    inc: list[set[Vertices]] = [set() for _ in range(inst.n)]
    for S in k:
        for v in S:
            inc[v].add(S)
    for v in range(inst.n):
        if sum(k[S] for S in inc[v]) < den:
            raise ValueError(f"covering constraint violated at vertex {v}")

    # a shift keeps the coverage of W minus K(v) unchanged, so one pass suffices
    for unit in inst.units():
        v = unit[0]
        Kv = set(unit)
        while True:
            excess = sum(k[S] for S in inc[v]) - den
            if excess <= 0:
                break
            W = min(inc[v], key=lambda S: (-len(S), S))
            b = min(k[W], excess)
            k[W] -= b
            if k[W] == 0:
                del k[W]
                for u in W:
                    inc[u].discard(W)
            U = tuple(u for u in W if u not in Kv)
            if U:
                if U not in k:
                    k[U] = 0
                    for u in U:
                        inc[u].add(U)
                k[U] += b
    return FractionalClusterSolution(inst.n, den, list(k.items()))
