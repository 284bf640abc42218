"""Pure-numpy fallback for the shortest-path kernels.

Dense O(n^2)-per-source Dijkstra: each iteration finalizes one node per
source and relaxes its full weight row.  Relaxing non-edges (``inf``) is a
no-op, so no adjacency scan is needed.  Slower than the numba CSR kernels on
large sparse graphs but dependency-free.
"""

from __future__ import annotations

import numpy as np


def _dense_weights(indptr, indices, weights, n):
    w = np.full((n, n), np.inf)
    for v in range(n):
        w[v, indices[indptr[v]:indptr[v + 1]]] = weights[indptr[v]:indptr[v + 1]]
    return w


def sssp(indptr, indices, weights, source, n):
    """Distances from ``source``; ``inf`` where unreachable."""
    return all_pairs(indptr, indices, weights, n, sources=np.array([source]))[0]


def all_pairs(indptr, indices, weights, n, sources=None):
    """All-pairs distance matrix; all sources advance in lockstep."""
    w = _dense_weights(indptr, indices, weights, n)
    if sources is None:
        sources = np.arange(n)
    m = sources.shape[0]
    rows = np.arange(m)
    dist = np.full((m, n), np.inf)
    dist[rows, sources] = 0.0
    finalized = np.zeros((m, n), dtype=bool)
    for _ in range(n):
        frontier = np.where(finalized, np.inf, dist)
        u = np.argmin(frontier, axis=1)
        du = frontier[rows, u]
        active = np.isfinite(du)
        if not active.any():
            break
        finalized[rows[active], u[active]] = True
        cand = du[:, None] + w[u]
        np.minimum(dist, cand, out=dist, where=active[:, None])
    return dist
