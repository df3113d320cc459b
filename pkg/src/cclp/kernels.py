"""Hot loops, each with a numba and a pure-numpy implementation.

The public functions dispatch on :data:`cclp._accel.USE_NUMBA` unless a
``backend`` argument is given. Random inputs are always drawn by the caller
so that both backends return bit-identical results.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key

import numpy as np

from . import _accel
from ._accel import njit


def _use_numba(backend: str | None) -> bool:
    if backend is None:
        return _accel.USE_NUMBA
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend == "numba"


def popcounts(size: int) -> np.ndarray:
    pc = np.zeros(size, dtype=np.int64)
    for b in range(max(size - 1, 0).bit_length()):
        step = 1 << b
        pc[step: 2 * step] = pc[:step] + 1
    return pc


# ---------------------------------------------------------------------------
# doubled cluster cost of every subset of a small vertex set


@njit
def _subset_cost2_nb(deg_m1, nbr_mask):
    n = deg_m1.shape[0]
    size = 1 << n
    cost2 = np.zeros(size, dtype=np.int64)
    pc = np.zeros(size, dtype=np.int64)
    for mask in range(1, size):
        pc[mask] = pc[mask >> 1] + (mask & 1)
    for mask in range(1, size):
        v = 0
        while not (mask >> v) & 1:
            v += 1
        rest = mask ^ (1 << v)
        cost2[mask] = cost2[rest] + deg_m1[v] + 2 * pc[rest] - 4 * pc[rest & nbr_mask[v]]
    return cost2


def _subset_cost2_np(deg_m1, nbr_mask):
    n = len(deg_m1)
    size = 1 << n
    cost2 = np.zeros(size, dtype=np.int64)
    pc = popcounts(size)
    for v in range(n):
        lo = 1 << v
        rest = np.arange(lo, dtype=np.int64)
        cost2[lo: 2 * lo] = (cost2[:lo] + deg_m1[v] + 2 * pc[:lo]
                             - 4 * pc[rest & int(nbr_mask[v])])
    return cost2


def subset_cost2_table(deg_m1, nbr_mask, backend: str | None = None) -> np.ndarray:
    """``cost2`` of every vertex subset, indexed by bitmask.

    ``deg_m1[v]`` is the +degree without the self-loop and ``nbr_mask[v]``
    the bitmask of +neighbors of ``v`` (self excluded).
    """
    deg_m1 = np.ascontiguousarray(deg_m1, dtype=np.int64)
    nbr_mask = np.ascontiguousarray(nbr_mask, dtype=np.int64)
    if _use_numba(backend):
        return _subset_cost2_nb(deg_m1, nbr_mask)
    return _subset_cost2_np(deg_m1, nbr_mask)


# ---------------------------------------------------------------------------
# exact partition DP over subsets


@njit
def _lex_less(a, b):
    # sorted-tuple order on two distinct bitmasks
    diff = a ^ b
    i = 0
    while not (diff >> i) & 1:
        i += 1
    if (a >> i) & 1:
        return (b >> (i + 1)) != 0
    return (a >> (i + 1)) == 0


@njit
def _partition_dp_nb(cost2):
    size = cost2.shape[0]
    best = np.zeros(size, dtype=np.int64)
    choice = np.zeros(size, dtype=np.int64)
    for mask in range(1, size):
        low = mask & (-mask)
        rest = mask ^ low
        sub = rest
        have = False
        bval = 0
        bcand = 0
        while True:
            cand = sub | low
            val = cost2[cand] + best[mask ^ cand]
            if (not have) or val < bval or (val == bval and _lex_less(cand, bcand)):
                have = True
                bval = val
                bcand = cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask] = bval
        choice[mask] = bcand
    return best, choice


def _lex_less_py(a: int, b: int) -> bool:
    diff = a ^ b
    i = (diff & -diff).bit_length() - 1
    if (a >> i) & 1:
        return (b >> (i + 1)) != 0
    return (a >> (i + 1)) == 0


def _submasks(rest: int) -> np.ndarray:
    subs = np.zeros(1, dtype=np.int64)
    r = rest
    while r:
        b = r & -r
        subs = np.concatenate([subs, subs | b])
        r ^= b
    return subs


def _partition_dp_np(cost2):
    size = len(cost2)
    best = np.zeros(size, dtype=np.int64)
    choice = np.zeros(size, dtype=np.int64)
    for mask in range(1, size):
        low = mask & -mask
        cands = _submasks(mask ^ low) | low
        vals = cost2[cands] + best[mask ^ cands]
        bval = vals.min()
        tied = cands[vals == bval]
        bcand = int(tied[0])
        for c in tied[1:]:
            if _lex_less_py(int(c), bcand):
                bcand = int(c)
        best[mask] = bval
        choice[mask] = bcand
    return best, choice


def partition_dp(cost2, backend: str | None = None):
    """Minimum total ``cost2`` partition of every subset.

    Returns ``(best, choice)`` where ``choice[mask]`` is the cluster holding
    the lowest vertex of ``mask`` in the optimal partition whose clusters,
    listed by minimum element as sorted tuples, are lexicographically least.
    """
    cost2 = np.ascontiguousarray(cost2, dtype=np.int64)
    if _use_numba(backend):
        return _partition_dp_nb(cost2)
    return _partition_dp_np(cost2)


# ---------------------------------------------------------------------------
# exhaustive minimum-ratio extension of a root atom


@njit
def _ratio_less(num_a, den_a, pc_a, mask_a, num_b, den_b, pc_b, mask_b):
    lhs = num_a * den_b
    rhs = num_b * den_a
    if lhs != rhs:
        return lhs < rhs
    if pc_a != pc_b:
        return pc_a < pc_b
    return mask_a < mask_b


@njit
def _best_ratio_nb(base_num, base_size, base_p, add, nb, extra, p):
    m = add.shape[0]
    cnt = np.zeros(m, dtype=np.int64)
    num = base_num
    den = base_p
    size = base_size
    mask = 0
    pc = 0
    best_num = num
    best_den = den
    best_mask = 0
    best_pc = 0
    for i in range(1, 1 << m):
        j = 0
        while not (i >> j) & 1:
            j += 1
        bit = 1 << j
        if mask & bit:
            size -= 1
            num -= add[j] + 2 * size - 4 * cnt[j] + extra[j]
            den -= p[j]
            mask ^= bit
            pc -= 1
            for k in range(m):
                if (nb[j] >> k) & 1:
                    cnt[k] -= 1
        else:
            num += add[j] + 2 * size - 4 * cnt[j] + extra[j]
            den += p[j]
            size += 1
            mask ^= bit
            pc += 1
            for k in range(m):
                if (nb[j] >> k) & 1:
                    cnt[k] += 1
        if _ratio_less(num, den, pc, mask, best_num, best_den, best_pc, best_mask):
            best_num = num
            best_den = den
            best_mask = mask
            best_pc = pc
    return best_mask, best_num, best_den


def _best_ratio_np(base_num, base_size, base_p, add, nb, extra, p):
    m = len(add)
    size = 1 << m
    pc = popcounts(size)
    num = np.zeros(size, dtype=np.int64)
    den = np.zeros(size, dtype=np.int64)
    num[0] = base_num
    den[0] = base_p
    for v in range(m):
        lo = 1 << v
        rest = np.arange(lo, dtype=np.int64)
        num[lo: 2 * lo] = (num[:lo] + add[v] + 2 * (base_size + pc[:lo])
                           - 4 * pc[rest & int(nb[v])] + extra[v])
        den[lo: 2 * lo] = den[:lo] + p[v]
    ratio = num / den
    rmin = ratio.min()
    near = np.flatnonzero(ratio <= rmin * (1 + 1e-9) + 1e-300)

    def cmp(a, b):
        fa = Fraction(int(num[a]), int(den[a]))
        fb = Fraction(int(num[b]), int(den[b]))
        if fa != fb:
            return -1 if fa < fb else 1
        if pc[a] != pc[b]:
            return -1 if pc[a] < pc[b] else 1
        return -1 if a < b else (1 if a > b else 0)

    best = min((int(i) for i in near), key=cmp_to_key(cmp))
    return best, int(num[best]), int(den[best])


def best_ratio_subset(base_num, base_size, base_p, add, nb, extra, p,
                      backend: str | None = None):
    """Subset ``X`` of candidates minimising ``num(X) / den(X)``.

    ``num`` is the doubled cover of ``K + X`` and ``den`` its integer mass;
    ``add[j] = d(j) - 1 - 4 d(j, K)``, ``nb[j]`` is the candidate +neighbor
    bitmask and ``extra[j]`` the doubled cross degree of candidate ``j``.
    Ties go to fewer vertices, then the smaller mask.
    """
    add = np.ascontiguousarray(add, dtype=np.int64)
    nb = np.ascontiguousarray(nb, dtype=np.int64)
    extra = np.ascontiguousarray(extra, dtype=np.int64)
    p = np.ascontiguousarray(p, dtype=np.int64)
    if _use_numba(backend):
        mask, num, den = _best_ratio_nb(np.int64(base_num), np.int64(base_size),
                                        np.int64(base_p), add, nb, extra, p)
        return int(mask), int(num), int(den)
    return _best_ratio_np(int(base_num), int(base_size), int(base_p), add, nb, extra, p)


# ---------------------------------------------------------------------------
# estimator sampling


@njit
def _sample_leaving_nb(cum, kv, indptr, indices, in_k, u_vertex, u_edge, u_discard, target):
    total = cum[cum.shape[0] - 1]
    attempts = 0
    accepted = 0
    leaving = 0
    for t in range(u_vertex.shape[0]):
        if accepted >= target:
            break
        attempts += 1
        x = u_vertex[t] * total
        i = np.searchsorted(cum, x, side="right")
        if i >= kv.shape[0]:
            i = kv.shape[0] - 1
        v = kv[i]
        deg = indptr[v + 1] - indptr[v]
        off = int(u_edge[t] * deg)
        if off >= deg:
            off = deg - 1
        w = indices[indptr[v] + off]
        if in_k[w]:
            if u_discard[t] < 0.5:
                continue
            accepted += 1
        else:
            accepted += 1
            leaving += 1
    return attempts, accepted, leaving


def _sample_leaving_np(cum, kv, indptr, indices, in_k, u_vertex, u_edge, u_discard, target):
    total = cum[-1]
    idx = np.minimum(np.searchsorted(cum, u_vertex * total, side="right"), len(kv) - 1)
    v = kv[idx]
    deg = indptr[v + 1] - indptr[v]
    off = np.minimum((u_edge * deg).astype(np.int64), deg - 1)
    w = indices[indptr[v] + off]
    inner = in_k[w]
    acc = ~inner | (u_discard >= 0.5)
    cum_acc = np.cumsum(acc)
    if len(cum_acc) and cum_acc[-1] >= target:
        stop = int(np.searchsorted(cum_acc, target)) + 1
    else:
        stop = len(acc)
    acc = acc[:stop]
    leave = ~inner[:stop]
    return stop, int(acc.sum()), int(leave.sum())


def sample_leaving(cum, kv, indptr, indices, in_k, u_vertex, u_edge, u_discard, target,
                   backend: str | None = None):
    """Edge samples incident on an atom until ``target`` are accepted.

    A vertex of the atom is drawn proportional to its degree (without
    self-loop), then a uniform incident edge; edges inside the atom are
    discarded with probability 1/2. Returns ``(attempts, accepted, leaving)``.
    """
    if _use_numba(backend):
        a, b, c = _sample_leaving_nb(cum, kv, indptr, indices, in_k,
                                     u_vertex, u_edge, u_discard, np.int64(target))
        return int(a), int(b), int(c)
    return _sample_leaving_np(cum, kv, indptr, indices, in_k,
                              u_vertex, u_edge, u_discard, target)


@njit
def _sample_neg_pairs_nb(kv, adj, u_first, u_second):
    k = kv.shape[0]
    neg = 0
    for t in range(u_first.shape[0]):
        i = int(u_first[t] * k)
        if i >= k:
            i = k - 1
        j = int(u_second[t] * (k - 1))
        if j >= k - 1:
            j = k - 2
        if j >= i:
            j += 1
        if not adj[kv[i], kv[j]]:
            neg += 1
    return neg


def _sample_neg_pairs_np(kv, adj, u_first, u_second):
    k = len(kv)
    i = np.minimum((u_first * k).astype(np.int64), k - 1)
    j = np.minimum((u_second * (k - 1)).astype(np.int64), k - 2)
    j = j + (j >= i)
    return int((~adj[kv[i], kv[j]]).sum())


def sample_neg_pairs(kv, adj, u_first, u_second, backend: str | None = None) -> int:
    """Number of uniformly drawn distinct pairs of ``kv`` that are -edges."""
    if _use_numba(backend):
        return int(_sample_neg_pairs_nb(kv, adj, u_first, u_second))
    return _sample_neg_pairs_np(kv, adj, u_first, u_second)
