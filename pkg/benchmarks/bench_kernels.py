"""Compare the numba kernels with their numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs once per backend to warm up, then ``repeat`` timed runs;
the best time is reported. Outputs are checked to be identical.
"""
import argparse
import time

import numpy as np

from cclp import generate
from cclp.kernels import (partition_dp, sample_leaving, sample_neg_pairs,
                          subset_cost2_table)


def masks(g, vertices):
    pos = {v: i for i, v in enumerate(vertices)}
    out = np.zeros(len(vertices), dtype=np.int64)
    for v in vertices:
        for u in vertices:
            if u != v and g.adj[v, u]:
                out[pos[v]] |= 1 << pos[u]
    return g.deg[vertices] - 1, out


def cases(rng):
    g = generate("planted", seed=0, n=14, k=3, p_flip=0.1)
    deg_m1, nb = masks(g, list(range(14)))
    cost2 = subset_cost2_table(deg_m1, nb)
    yield "subset_cost2_table n=14", lambda b: subset_cost2_table(deg_m1, nb, backend=b)
    yield "partition_dp n=14", lambda b: partition_dp(cost2, backend=b)[0]

    big = generate("planted", seed=1, n=2000, k=10, p_flip=0.05)
    kv = np.arange(200, dtype=np.int64)
    in_k = np.zeros(big.n, dtype=bool)
    in_k[kv] = True
    cum = np.cumsum(big.deg[kv] - 1).astype(np.float64)
    s = 1 << 16
    draws = [rng.random(s) for _ in range(3)]
    yield "sample_leaving |K|=200", lambda b: sample_leaving(
        cum, kv, big.nb_indptr, big.nb_indices, in_k, *draws, s, backend=b)
    first, second = rng.random(s), rng.random(s)
    yield "sample_neg_pairs |K|=200", lambda b: sample_neg_pairs(kv, big.adj, first, second, backend=b)


def best_time(fn, backend, repeat):
    fn(backend)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(backend)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, fn in cases(rng):
        a, b = fn("numba"), fn("numpy")
        if not np.array_equal(np.asarray(a), np.asarray(b)):
            raise SystemExit(f"{name}: backends disagree")
        t_nb = best_time(fn, "numba", args.repeat)
        t_np = best_time(fn, "numpy", args.repeat)
        print(f"{name:28s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
