#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times all-pairs shortest paths (the package's hot kernel) on K-ring overlays
of growing size, once per backend, and prints a comparison table.  Run:

    python benchmarks/bench_backends.py [--sizes 100,200,400,800] [--repeats 3]

The active default backend for library users is controlled by the
RINGBENCH_BACKEND environment variable; this script always measures both.
"""

import argparse
import time

import numpy as np

from ringbench import DegreeBound, all_pairs_shortest, gen_uniform, rapid_k_ring


def time_backend(topo, w, backend, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        dist = all_pairs_shortest(topo, w, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, dist


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="100,200,400,800")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    # compile outside the timed region
    from ringbench import _kernels_numba

    _kernels_numba.warmup()

    print(f"{'n':>6} {'k':>3} {'numba (ms)':>12} {'numpy (ms)':>12} {'speedup':>9}")
    for n in sizes:
        k = DegreeBound.log2ceil(n)
        w = gen_uniform(n, args.seed)
        topo = rapid_k_ring(n, k, args.seed)
        t_nb, d_nb = time_backend(topo, w, "numba", args.repeats)
        t_np, d_np = time_backend(topo, w, "numpy", args.repeats)
        if not np.allclose(d_nb, d_np, atol=1e-9, rtol=0):
            raise AssertionError(f"backend mismatch at n={n}")
        print(f"{n:>6} {k.k:>3} {t_nb * 1000:>12.2f} {t_np * 1000:>12.2f} "
              f"{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
