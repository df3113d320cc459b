"""Disjoint low-ratio clusters covering a target share of the vertex mass."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cover import CrossDegrees
from .graph import SignedGraph, cluster_cost2
from .precluster import PreclusteredInstance, candidate_set
from .ratio_cluster import RatioClusterParams, RootContext, generate_cluster_by_sampling


@dataclass
class VertexDistribution:
    """Masses ``num[v] / den``; inactive vertices carry zero mass."""

    num: list[int]
    den: int

    def __post_init__(self) -> None:
        if self.den <= 0 or sum(self.num) != self.den or any(x < 0 for x in self.num):
            raise ValueError("masses must be non-negative integers summing to den")

    def __getitem__(self, v: int) -> Fraction:
        return Fraction(self.num[v], self.den)

    def mass(self, S) -> Fraction:
        return Fraction(sum(self.num[v] for v in S), self.den)

    @classmethod
    def uniform(cls, n: int, active: Sequence[bool] | None = None) -> "VertexDistribution":
        act = [True] * n if active is None else [bool(a) for a in active]
        return cls([int(a) for a in act], sum(act))

    @classmethod
    def from_weights(cls, weights: np.ndarray, bits: int = 52) -> "VertexDistribution":
        """Quantize positive float weights (zero stays zero) to integer masses."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if not total > 0:
            raise ValueError("weights must have positive total")
        scale = float(1 << bits)
        num = [max(1, int(round(x / total * scale))) if x > 0 else 0 for x in w.tolist()]
        return cls(num, sum(num))


@dataclass
class FamilyParams:
    search: RatioClusterParams = field(default_factory=RatioClusterParams)
    search_factor: int = 3
    insert_factor: int = 6
    prepass_factor: int = 0
    rounds_const: float = 1.0
    fill: bool = False

    @property
    def gamma(self) -> Fraction:
        return self.search.gamma


@dataclass
class PartialFamily:
    clusters: list[tuple[int, ...]]
    covered_mass: Fraction
    total_cover2: Fraction
    exhausted: bool = False
    stats: dict = field(default_factory=dict)


def r_grid(n: int, dcross_total, gamma) -> list[Fraction]:
    """Powers of ``1 + gamma`` covering ``[max(1, d/2), 2 (n^2 + d)]``."""
    gamma = Fraction(gamma)
    d = Fraction(dcross_total)
    lo = max(Fraction(1), d / 2)
    hi = 2 * (n * n + d)
    base = 1 + gamma
    j = max(0, math.floor(math.log(lo) / math.log(base)) - 1)
    val = base ** j
    while val < lo:
        val *= base
    out = [val]
    while out[-1] < hi:
        out.append(out[-1] * base)
    return out


def family_to_point(f: PartialFamily, gamma) -> dict[tuple[int, ...], Fraction]:
    """One MWU point: ``z_S = 1 / p(F)`` on the family, capped at ``1 / gamma``."""
    if not f.clusters or f.covered_mass <= 0:
        raise ValueError("empty family")
    val = min(1 / f.covered_mass, 1 / Fraction(gamma))
    return {S: val for S in f.clusters}


def _sample_roots(g: SignedGraph, active: np.ndarray, eps: float, const: float,
                  rng: np.random.Generator) -> np.ndarray:
    rounds = max(1, math.ceil(const * math.log(max(g.n, 2)) / eps ** 2))
    prob = np.minimum(1.0, 1.0 / g.deg)
    hit = (rng.random((rounds, g.n)) < prob).any(axis=0)
    return np.flatnonzero(hit & active)


def find_family(g: SignedGraph, inst: PreclusteredInstance, cd: CrossDegrees,
                dist: VertexDistribution, R, mode: str = "fast",
                params: FamilyParams | None = None, rng: np.random.Generator | None = None,
                active: Sequence[bool] | None = None) -> PartialFamily:
    """Greedy disjoint family with cover/mass ratio near ``R``.

    ``poly`` roots every vertex and refreshes every cluster hit by an
    insertion; ``fast`` samples roots and refreshes a cluster only after a
    ``gamma`` share of its mass is gone. With ``params.fill`` the family
    keeps growing past the ``gamma`` share while some cluster still fits.
    """
    if mode not in ("fast", "poly"):
        raise ValueError(f"unknown mode {mode!r}")
    params = params or FamilyParams()
    rng = rng or np.random.default_rng(0)
    R = Fraction(R)
    gamma = params.gamma
    n = g.n
    act = np.ones(n, dtype=bool) if active is None else np.asarray(active, dtype=bool)
    p = dist.num
    den = dist.den
    if sum(p[v] for v in range(n) if act[v]) == 0:
        raise ValueError("distribution has no mass on the active vertices")
    phat = [p[v] if act[v] else 0 for v in range(n)]
    target = (1 + params.search_factor * gamma) * R
    bound = (1 + params.insert_factor * gamma) * R
    prepass_bound = (1 + params.prepass_factor * gamma) * R
    d_total = sum((cd[v] for v in range(n) if act[v]), Fraction(0))
    cover_cache: dict[tuple[int, ...], int] = {}

    def cover2_of(C: tuple[int, ...]) -> int:
        # doubled cover; integral because C never splits an atom
        val = cover_cache.get(C)
        if val is None:
            dc2 = 2 * cd.of(C)
            if dc2.denominator != 1:
                raise AssertionError(f"cluster {C} splits an atom")
            val = cluster_cost2(g, C) + int(dc2)
            cover_cache[C] = val
        return val

    def fits(C: tuple[int, ...], lim: Fraction) -> bool:
        return cover2_of(C) * den * lim.denominator <= 2 * lim.numerator * sum(p[v] for v in C)

    clusters: list[tuple[int, ...]] = []
    covered = 0
    stats = {"prepass_atoms": 0, "zeroed_light": 0, "searches": 0, "refreshes": 0,
             "rejected_pops": 0}

    def take(C: tuple[int, ...]) -> None:
        nonlocal covered
        clusters.append(C)
        covered += sum(p[v] for v in C)
        for v in C:
            phat[v] = 0

    units = [u for u in inst.units() if act[u[0]]]
    for K in units:
        if any(phat[v] == 0 for v in K):
            continue
        if fits(K, prepass_bound):
            take(K)
            stats["prepass_atoms"] += 1
        elif any(p[v] * 4 * d_total <= gamma * cd[v] * den for v in K):
            for v in K:
                phat[v] = 0
            stats["zeroed_light"] += 1

    def reached() -> bool:
        return covered * gamma.denominator > gamma.numerator * den

    def done() -> bool:
        # with ``fill`` the family keeps growing while clusters still fit
        return covered == den if params.fill else reached()

    def search(r: int) -> tuple[int, ...] | None:
        stats["searches"] += 1
        mass = {u: phat[u] for u in pool_of(r)}
        ctx = RootContext.build(inst, r, target, mass, {u: cd[u] for u in mass},
                                ncand=ncand_of(r), pden=den)
        return generate_cluster_by_sampling(g, ctx, params.search, rng)

    ncand_cache: dict[int, tuple[int, ...]] = {}

    def ncand_of(r: int) -> tuple[int, ...]:
        if r not in ncand_cache:
            ncand_cache[r] = tuple(u for u in candidate_set(inst, r) if act[u])
        return ncand_cache[r]

    def pool_of(r: int) -> set[int]:
        return set(inst.K(r)) | set(ncand_of(r))

    if mode == "fast":
        sampled = _sample_roots(g, act, params.search.eps, params.rounds_const, rng)
    else:
        sampled = np.flatnonzero(act)
    roots: list[int] = []
    seen_units: set[int] = set()
    for r in sampled.tolist():
        key = inst.K(r)[0]
        if key not in seen_units:
            seen_units.add(key)
            roots.append(r)

    current: dict[int, tuple[int, ...]] = {}
    created_mass: dict[int, int] = {}
    version: dict[int, int] = {}
    refreshes: dict[int, int] = {}
    heap: list = []

    def refresh(r: int) -> None:
        version[r] = version.get(r, 0) + 1
        current.pop(r, None)
        if any(phat[v] == 0 for v in inst.K(r)):
            return
        C = search(r)
        if C is None:
            return
        mass = sum(phat[v] for v in C)
        current[r] = C
        created_mass[r] = mass
        heapq.heappush(heap, (Fraction(cover2_of(C) * den, mass), r, version[r]))

    if not done():
        for r in roots:
            refresh(r)
    while not done():
        if not heap:
            break
        _, r, ver = heapq.heappop(heap)
        if ver != version.get(r) or r not in current:
            continue
        C = tuple(v for v in current[r] if phat[v] > 0)
        if len(C) < len(current[r]) and any(phat[v] == 0 for v in inst.K(r)):
            version[r] += 1
            current.pop(r)
            continue
        if not C or not fits(C, bound):
            stats["rejected_pops"] += 1
            if refreshes.get(r, 0) <= n:
                refreshes[r] = refreshes.get(r, 0) + 1
                refresh(r)
            continue
        take(C)
        hit = set(C)
        for r2 in sorted(current):
            C2 = current[r2]
            if hit.isdisjoint(C2):
                continue
            left = sum(phat[v] for v in C2)
            if mode == "poly" or left * (gamma.denominator) <= (gamma.denominator - gamma.numerator) * created_mass[r2]:
                refreshes[r2] = refreshes.get(r2, 0) + 1
                stats["refreshes"] += 1
                refresh(r2)
    stats["max_refreshes"] = max(refreshes.values(), default=0)
    stats["roots"] = len(roots)
    overlap = np.zeros(n, dtype=np.int64)
    for C in current.values():
        overlap[list(C)] += 1
    stats["max_overlap"] = int(overlap.max()) if n else 0
    total_cover2 = Fraction(sum(cover2_of(C) for C in clusters))
    return PartialFamily(clusters, Fraction(covered, den), total_cover2,
                         exhausted=not reached(), stats=stats)
