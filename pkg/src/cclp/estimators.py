"""Sampling estimators for the sublinear mode: atom cross degree, candidate sets, cluster cost."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cover import CrossDegrees
from .graph import SignedGraph, cluster_cost2
from .kernels import sample_leaving, sample_neg_pairs
from .precluster import PreclusteredInstance

DEFAULT_MAX_SAMPLES = 1 << 15


@dataclass(frozen=True)
class Estimate:
    """``kind`` is ``"estimate"`` or ``"certificate"`` (the atom may be emitted as a cluster)."""

    value: float
    kind: str
    samples_used: int
    exact: bool = False
    capped: bool = False

    @property
    def is_certificate(self) -> bool:
        return self.kind == "certificate"


def _log_n(n: int) -> int:
    return max(1, math.ceil(math.log(max(n, 2))))


def _leaving_once(g: SignedGraph, kv: np.ndarray, in_k: np.ndarray, cum: np.ndarray,
                  target: int, rng: np.random.Generator, backend) -> tuple[int, int]:
    attempts = accepted = leaving = 0
    while accepted < target:
        chunk = 2 * (target - accepted) + 64
        a, b, c = sample_leaving(cum, kv, g.nb_indptr, g.nb_indices, in_k,
                                 rng.random(chunk), rng.random(chunk), rng.random(chunk),
                                 target - accepted, backend=backend)
        attempts += a
        accepted += b
        leaving += c
    return attempts, leaving


def estimate_d_cross(g: SignedGraph, K: Sequence[int], beta: float, seed: int = 0,
                     paper_constants: bool = False, max_samples: int | None = DEFAULT_MAX_SAMPLES,
                     exact_shortcut: bool = True, backend: str | None = None) -> Estimate:
    """Estimate ``d_cross(K) = |E+(K, V-K)| + 2 |E-(K)|`` for an atom ``K``.

    Leaving edges come from degree-proportional vertex draws followed by a
    uniform incident edge, with inside edges kept with probability 1/2;
    inside -pairs come from uniform distinct pairs. Each part is the median of
    ``ceil(ln n)`` repetitions. When the sample budget covers every incidence
    and pair the value is computed exactly through the same counted queries.
    """
    kv = np.asarray(sorted({int(v) for v in K}), dtype=np.int64)
    k = len(kv)
    if k < 2:
        raise ValueError("atom must have at least two vertices")
    if not beta > 0:
        raise ValueError("beta must be positive")
    n = g.n
    reps = _log_n(n)
    const = 32 if paper_constants else 1
    s = math.ceil(const * beta ** -4 * k * reps)
    capped = max_samples is not None and s > max_samples
    if capped:
        s = int(max_samples)
    deg_m1 = g.deg[kv] - 1
    dk = int(deg_m1.sum())
    pairs = k * (k - 1) // 2
    g.counter.add(degree=k)
    threshold = 6 * beta * k

    if exact_shortcut and s >= dk + pairs:
        in_k = np.zeros(n, dtype=bool)
        in_k[kv] = True
        g.counter.add(neighbor=dk, edge=pairs)
        leaving = sum(int((~in_k[g.nb_indices[g.nb_indptr[v]: g.nb_indptr[v + 1]]]).sum()) for v in kv.tolist())
        sub = g.adj[np.ix_(kv, kv)]
        neg = int((~sub).sum()) // 2
        value = float(leaving + 2 * neg)
        kind = "certificate" if value <= threshold else "estimate"
        return Estimate(value, kind, dk + pairs, exact=True, capped=False)

    rng = np.random.default_rng(seed)
    in_k = np.zeros(n, dtype=bool)
    in_k[kv] = True
    cum = np.cumsum(deg_m1).astype(np.float64)
    xs, ys = [], []
    used = 0
    for _ in range(reps):
        if dk > 0:
            attempts, leaving = _leaving_once(g, kv, in_k, cum, s, rng, backend)
            g.counter.add(neighbor=attempts)
            used += attempts
            xs.append(dk * leaving / attempts)
        else:
            xs.append(0.0)
        neg = sample_neg_pairs(kv, g.adj, rng.random(s), rng.random(s), backend=backend)
        g.counter.add(edge=s)
        used += s
        ys.append(pairs * neg / s)
    value = float(np.median(xs) + 2 * np.median(ys))
    kind = "certificate" if value <= threshold else "estimate"
    return Estimate(value, kind, used, exact=False, capped=capped)


def approx_D(g: SignedGraph, inst: PreclusteredInstance, r: int, seed: int = 0) -> tuple[int, ...]:
    """Approximate candidates outside the atom of ``r``: admissible partners of
    both ``r`` and the sampled member with the fewest admissible partners."""
    if not inst.in_atom(r):
        raise ValueError(f"vertex {r} is not in a non-singleton atom")
    K = inst.K(r)
    rng = np.random.default_rng(seed)
    picks = rng.choice(np.asarray(K, dtype=np.int64), size=_log_n(g.n), replace=True)
    u = min(picks.tolist(), key=lambda v: (inst.d_adm(v), v))
    return tuple(sorted(set(inst.nadm[u]) & set(inst.nadm[r])))


def delta_vertex(g: SignedGraph, K: Sequence[int], T: Sequence[int], v: int) -> Fraction:
    """Share of ``v`` in ``cost(T) - cost(K)`` for ``v`` in ``T`` outside ``K``."""
    T = np.asarray(sorted(set(int(u) for u in T)), dtype=np.int64)
    K = np.asarray(sorted(set(int(u) for u in K)), dtype=np.int64)
    g.counter.add(degree=1, edge=len(T) + len(K))
    d = int(g.deg[v])
    pos_t = int(g.adj[v, T].sum())
    pos_k = int(g.adj[v, K].sum())
    neg_t = len(T) - pos_t
    neg_k = len(K) - pos_k
    return Fraction(d + neg_t + neg_k - pos_t - pos_k, 2)


def delta_exact(g: SignedGraph, K: Sequence[int], T: Sequence[int]) -> Fraction:
    """``cost(T) - cost(K)``."""
    return Fraction(cluster_cost2(g, T) - cluster_cost2(g, K), 2)


def estimate_delta(g: SignedGraph, K: Sequence[int], T: Sequence[int], beta: float,
                   seed: int = 0, epsilon: float = 0.3, paper_constants: bool = False) -> tuple[float, int]:
    """Estimate ``cost(T) - cost(K)`` from uniform draws of ``T`` minus ``K``.

    Returns ``(value, samples)``; enumerates exactly when the budget covers
    every vertex.
    """
    Kset = set(int(u) for u in K)
    rest = sorted(set(int(u) for u in T) - Kset)
    if not rest:
        return 0.0, 0
    s = math.ceil(beta ** -2 * _log_n(g.n) * (epsilon ** -20 if paper_constants else 1))
    if s >= len(rest):
        return float(sum((delta_vertex(g, K, T, v) for v in rest), Fraction(0))), len(rest)
    rng = np.random.default_rng(seed)
    picks = rng.integers(len(rest), size=s)
    total = sum((delta_vertex(g, K, T, rest[i]) for i in picks.tolist()), Fraction(0))
    return float(total * len(rest) / s), s


def estimate_cost(g: SignedGraph, cd: CrossDegrees | None, r: int, T: Sequence[int], beta: float,
                  seed: int = 0, inst: PreclusteredInstance | None = None, epsilon: float = 0.3,
                  paper_constants: bool = False) -> float:
    """Estimate ``cost(T)`` as the atom part ``d_cross(K(r)) / 2`` plus the
    estimated change from adding the rest of ``T``."""
    T = tuple(sorted(set(int(u) for u in T)))
    if r not in T:
        raise ValueError("root must belong to T")
    if inst is not None:
        atoms_hit = {int(inst.atom_of[v]) for v in T if inst.in_atom(v)}
        if len(atoms_hit) > 1:
            raise ValueError("T contains more than one atom")
        K = inst.K(r)
        if not set(K) <= set(T):
            raise ValueError("T must contain the atom of its root")
    else:
        K = (r,)
    rng = np.random.SeedSequence(seed).spawn(2)
    if len(K) == 1:
        g.counter.add(degree=1)
        atom_part = (int(g.deg[r]) - 1) / 2
    else:
        est = estimate_d_cross(g, K, beta, seed=int(rng[0].generate_state(1)[0]),
                               paper_constants=paper_constants)
        atom_part = est.value / 2
    delta, _ = estimate_delta(g, K, T, beta, seed=int(rng[1].generate_state(1)[0]),
                              epsilon=epsilon, paper_constants=paper_constants)
    return atom_part + delta
