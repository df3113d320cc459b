"""Search for one cluster around a root whose cover is small relative to its mass."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graph import SignedGraph, cluster_cost2
from .kernels import best_ratio_subset
from .precluster import PreclusteredInstance, candidate_set

_P_BITS = 32


@dataclass(frozen=True)
class RatioClusterParams:
    gamma: Fraction = Fraction(1, 10)
    eps: float = 0.3
    eta: int = 4
    eta0: int = 8
    samples: int = 64
    repeats: float = 1.0
    threshold_const: float = 6.0
    guess_budget: int = 16
    exhaustive_limit: int | None = None

    def __post_init__(self) -> None:
        if self.eta < 2 or self.eta0 < 1 or self.samples < self.eta0:
            raise ValueError("need eta >= 2 and 1 <= eta0 <= samples")

    @property
    def exhaustive_cap(self) -> int:
        return self.eta ** 2 if self.exhaustive_limit is None else self.exhaustive_limit


def marginal(g: SignedGraph, T: Sequence[int], v: int) -> Fraction:
    """cost(T + v) - cost(T - v) by its closed form."""
    T = list(set(int(u) for u in T))
    if not T:
        raise ValueError("T must be nonempty")
    inside = v in T
    dvt = int(g.adj[v, T].sum())
    return Fraction(int(g.deg[v]) - 1, 2) + len(T) - 2 * dvt + int(inside)


def est_marg(g: SignedGraph, S: Sequence[int], t, v: int) -> Fraction:
    """Sampled marginal: ``(d(v)-1)/2 + t - 2 t d(v, S) / |S|`` over multiset ``S``."""
    S = np.asarray(S, dtype=np.int64)
    if S.size == 0:
        raise ValueError("sample multiset must be nonempty")
    t = Fraction(t)
    dvs = int(g.adj[v, S].sum())
    return Fraction(int(g.deg[v]) - 1, 2) + t - 2 * Fraction(dvs, len(S)) * t


@dataclass
class RootContext:
    """Root ``r`` with its atom, candidates and weights ``w = R p - d_cross``.

    Masses are integers ``pnum[v]`` over the common denominator ``pden``.
    Vertices of zero mass are left out of the candidates.
    """

    root: int
    K: tuple[int, ...]
    ncand: tuple[int, ...]
    D: tuple[int, ...]
    R: Fraction
    pnum: dict[int, int]
    pden: int
    dcross: dict[int, Fraction]

    @classmethod
    def build(cls, inst: PreclusteredInstance, r: int, R, p, dcross,
              ncand: Sequence[int] | None = None, pden: int | None = None) -> "RootContext":
        """``p`` holds masses, or integer numerators over ``pden`` when given."""
        K = inst.K(r)
        pool = candidate_set(inst, r) if ncand is None else tuple(ncand)
        Kset = set(K)
        D = tuple(sorted(u for u in pool if u not in Kset and p[u] > 0))
        verts = sorted(Kset | set(D))
        if pden is None:
            fr = {u: Fraction(p[u]) for u in verts}
            pden = math.lcm(*(f.denominator for f in fr.values())) if fr else 1
            pnum = {u: int(f * pden) for u, f in fr.items()}
        else:
            pnum = {u: int(p[u]) for u in verts}
        return cls(r, K, tuple(pool), D, Fraction(R), pnum, int(pden),
                   {u: Fraction(dcross[u]) for u in verts})

    def __post_init__(self) -> None:
        self.D_array = np.asarray(self.D, dtype=np.int64)
        r = float(self.R) / self.pden
        self.w_array = np.array([r * self.pnum[v] - float(self.dcross[v]) for v in self.D], dtype=float)
        dk = sum((self.dcross[v] for v in self.K), Fraction(0))
        self._dc2_k = 2 * dk
        self._dc2 = {v: 2 * self.dcross[v] for v in self.D}
        self._dc2 = {v: (int(x) if x.denominator == 1 else x) for v, x in self._dc2.items()}

    @property
    def p(self) -> dict[int, Fraction]:
        return {u: Fraction(k, self.pden) for u, k in self.pnum.items()}

    def w(self, v: int) -> Fraction:
        return self.R * Fraction(self.pnum[v], self.pden) - self.dcross[v]

    def w_set(self, T) -> Fraction:
        T = list(T)
        return (self.R * Fraction(sum(self.pnum[v] for v in T), self.pden)
                - sum((self.dcross[v] for v in T), Fraction(0)))

    def accepts(self, g: SignedGraph, T) -> bool:
        """Exact test of ``cost(T) <= w(T)``, i.e. ``cover(T) <= R p(T)``."""
        T = sorted(set(T))
        Kset = set(self.K)
        if Kset.issubset(T):
            dc2 = self._dc2_k + sum(self._dc2[v] if v in self._dc2 else 2 * self.dcross[v]
                                    for v in T if v not in Kset)
        else:
            dc2 = 2 * sum((self.dcross[v] for v in T), Fraction(0))
        lhs = (cluster_cost2(g, T) + dc2) * self.pden * self.R.denominator
        return lhs <= 2 * self.R.numerator * sum(self.pnum[v] for v in T)


def generate_cluster(g: SignedGraph, ctx: RootContext, samples: Sequence[Sequence[int]],
                     guesses: Sequence, params: RatioClusterParams) -> tuple[int, ...]:
    """Grow ``K(r)`` chunk by chunk using sampled marginal estimates.

    Thresholds are evaluated in floating point; values within rounding
    distance of the threshold are re-decided exactly.
    """
    eta = params.eta
    if len(samples) < eta or len(guesses) < eta or any(len(s) == 0 for s in samples[:eta]):
        raise ValueError("need eta nonempty sample sets and eta size guesses")
    D = ctx.D_array
    if not len(D):
        return tuple(sorted(ctx.K))
    slack = params.threshold_const * len(ctx.ncand) / eta
    wv = ctx.w_array
    tol = 1e-9 * (1 + float(np.abs(wv).max()))
    base = len(D) // eta
    bounds = [i * base for i in range(eta)] + [len(D)]
    keep = np.zeros(len(D), dtype=bool)
    for i in range(eta):
        lo, hi = bounds[i], bounds[i + 1]
        if lo == hi:
            continue
        chunk = D[lo:hi]
        S = np.asarray(samples[i], dtype=np.int64)
        t = float(guesses[i])
        frac = g.adj[chunk][:, S].sum(axis=1) / len(S)
        est = (g.deg[chunk] - 1) / 2 + t - 2 * frac * t
        gap = wv[lo:hi] - (est + slack)
        keep[lo:hi] = gap >= 0
        for j in np.flatnonzero(np.abs(gap) < tol).tolist():
            v = int(chunk[j])
            exact_slack = Fraction(params.threshold_const).limit_denominator() * len(ctx.ncand) / eta
            exact = ctx.w(v) - est_marg(g, S, Fraction(guesses[i]), v) - exact_slack
            keep[lo + j] = exact >= 0
    return tuple(sorted(list(ctx.K) + D[keep].tolist()))


def size_guesses(g: SignedGraph, r: int, params: RatioClusterParams) -> list[float]:
    """Powers of ``1 + 1/eta`` within ``[eps d(r), eps^-4 d(r)]``."""
    base = 1 + 1 / params.eta
    d = float(g.deg[r])
    lo, hi = params.eps * d, params.eps ** -4 * d
    j0 = math.ceil(math.log(lo) / math.log(base) - 1e-12)
    j1 = math.floor(math.log(hi) / math.log(base) + 1e-12)
    return [base ** j for j in range(j0, j1 + 1)]


def _scaled_masses(ctx: RootContext, verts: Sequence[int]) -> list[int]:
    masses = [ctx.pnum[v] for v in verts]
    total = sum(masses)
    if total <= 0:
        return [0] * len(masses)
    return [max(1, (m << _P_BITS) // total) if m > 0 else 0 for m in masses]


def exhaustive_cluster(g: SignedGraph, ctx: RootContext) -> tuple[int, ...] | None:
    """Minimum cover-to-mass set ``K(r) + X`` over all ``X`` in ``D(r)``.

    Returns it when it passes ``cost <= w``, else ``None``.
    """
    K = list(ctx.K)
    D = list(ctx.D)
    if sum(ctx.pnum[v] for v in K) <= 0:
        return None
    scaled = _scaled_masses(ctx, K + D)
    base_p = sum(scaled[: len(K)])
    pD = scaled[len(K):]
    cost_k = cluster_cost2(g, K)
    dk2 = 2 * sum((ctx.dcross[v] for v in K), Fraction(0))
    extra = [2 * ctx.dcross[v] for v in D]
    if dk2.denominator != 1 or any(e.denominator != 1 for e in extra):
        raise ValueError("exhaustive search needs integral doubled cross degrees")
    if D:
        idx = np.asarray(D, dtype=np.int64)
        dK = g.adj[np.ix_(idx, np.asarray(K, dtype=np.int64))].sum(axis=1)
        add = (g.deg[idx] - 1) - 4 * dK
        nb = g.nbr_masks(D)
    else:
        add = nb = np.zeros(0, dtype=np.int64)
    mask, _, _ = best_ratio_subset(cost_k + int(dk2), len(K), base_p, add, nb,
                                   [int(e) for e in extra], pD)
    T = tuple(sorted(K + [D[j] for j in range(len(D)) if (mask >> j) & 1]))
    return T if ctx.accepts(g, T) else None


def generate_cluster_by_sampling(g: SignedGraph, ctx: RootContext, params: RatioClusterParams,
                                 rng: np.random.Generator) -> tuple[int, ...] | None:
    """Sampled search for ``T`` with ``cost(T) <= w(T)``; ``None`` if none found.

    Small candidate sets are searched exhaustively. Otherwise each repetition
    draws ``eta`` multisets and tries up to ``guess_budget`` random choices of
    sub-multisets and size guesses, returning the first accepted cluster.
    """
    if len(ctx.D) <= params.exhaustive_cap:
        return exhaustive_cluster(g, ctx)
    pool = np.asarray(sorted(set(ctx.K) | set(ctx.D)), dtype=np.int64)
    guesses = size_guesses(g, ctx.root, params)
    if not guesses:
        guesses = [float(len(ctx.K))]
    reps = max(1, math.ceil(params.repeats * math.log(max(g.n, 2))))
    take = min(params.eta0, params.samples)
    if ctx.accepts(g, ctx.K):
        fallback = ctx.K
    else:
        fallback = None
    tried: set[tuple[int, ...]] = set()
    for _ in range(reps):
        A = pool[rng.integers(len(pool), size=(params.eta, params.samples))]
        for _ in range(params.guess_budget):
            pick = np.sort(np.argsort(rng.random((params.eta, params.samples)), axis=1)[:, :take], axis=1)
            S = np.take_along_axis(A, pick, axis=1)
            t = [guesses[int(i)] for i in rng.integers(len(guesses), size=params.eta)]
            T = generate_cluster(g, ctx, S, t, params)
            if T not in tried:
                tried.add(T)
                if ctx.accepts(g, T):
                    return T
    return fallback
