"""Numba-compiled shortest-path kernels over CSR adjacency.

These are the hot inner loops of the whole package: diameter evaluation is
called once per Q-learning step and once per benchmark cell.  Unreachable
pairs are reported as ``inf``.
"""

from __future__ import annotations

import warnings

import numpy as np

# the TBB probe warning fires on first parallel compile; it only means numba
# picked a different threading layer
warnings.filterwarnings("ignore", message=".*TBB_INTERFACE_VERSION.*")

from numba import njit, prange  # noqa: E402


@njit(cache=True)
def _dijkstra_into(indptr, indices, weights, source, dist, heap_d, heap_v, done):
    """Single-source Dijkstra writing into ``dist``; scratch arrays supplied.

    Lazy-deletion binary heap: stale entries are skipped on pop.  ``heap_d`` /
    ``heap_v`` must have room for one push per directed CSR entry plus one.
    """
    n = dist.shape[0]
    for i in range(n):
        dist[i] = np.inf
        done[i] = False
    dist[source] = 0.0

    heap_d[0] = 0.0
    heap_v[0] = source
    size = 1
    while size > 0:
        # pop min
        d = heap_d[0]
        v = heap_v[0]
        size -= 1
        heap_d[0] = heap_d[size]
        heap_v[0] = heap_v[size]
        i = 0
        while True:
            left = 2 * i + 1
            right = left + 1
            smallest = i
            if left < size and heap_d[left] < heap_d[smallest]:
                smallest = left
            if right < size and heap_d[right] < heap_d[smallest]:
                smallest = right
            if smallest == i:
                break
            heap_d[i], heap_d[smallest] = heap_d[smallest], heap_d[i]
            heap_v[i], heap_v[smallest] = heap_v[smallest], heap_v[i]
            i = smallest

        if done[v] or d > dist[v]:
            continue
        done[v] = True
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            nd = d + weights[e]
            if nd < dist[u]:
                dist[u] = nd
                # push (nd, u)
                j = size
                heap_d[j] = nd
                heap_v[j] = u
                size += 1
                while j > 0:
                    parent = (j - 1) // 2
                    if heap_d[parent] <= heap_d[j]:
                        break
                    heap_d[parent], heap_d[j] = heap_d[j], heap_d[parent]
                    heap_v[parent], heap_v[j] = heap_v[j], heap_v[parent]
                    j = parent


@njit(cache=True)
def sssp(indptr, indices, weights, source, n):
    """Distances from ``source``; ``inf`` where unreachable."""
    dist = np.empty(n, dtype=np.float64)
    cap = indices.shape[0] + 2
    heap_d = np.empty(cap, dtype=np.float64)
    heap_v = np.empty(cap, dtype=np.int64)
    done = np.empty(n, dtype=np.bool_)
    _dijkstra_into(indptr, indices, weights, source, dist, heap_d, heap_v, done)
    return dist


@njit(cache=True, parallel=True)
def _all_pairs_parallel(indptr, indices, weights, n):
    out = np.empty((n, n), dtype=np.float64)
    cap = indices.shape[0] + 2
    for s in prange(n):
        heap_d = np.empty(cap, dtype=np.float64)
        heap_v = np.empty(cap, dtype=np.int64)
        done = np.empty(n, dtype=np.bool_)
        _dijkstra_into(indptr, indices, weights, s, out[s], heap_d, heap_v, done)
    return out


@njit(cache=True)
def _all_pairs_serial(indptr, indices, weights, n):
    out = np.empty((n, n), dtype=np.float64)
    cap = indices.shape[0] + 2
    heap_d = np.empty(cap, dtype=np.float64)
    heap_v = np.empty(cap, dtype=np.int64)
    done = np.empty(n, dtype=np.bool_)
    for s in range(n):
        _dijkstra_into(indptr, indices, weights, s, out[s], heap_d, heap_v, done)
    return out


# thread-launch overhead dwarfs the work below this size
_PARALLEL_MIN_N = 128


def all_pairs(indptr, indices, weights, n):
    """All-pairs distance matrix via per-source Dijkstra."""
    if n < _PARALLEL_MIN_N:
        return _all_pairs_serial(indptr, indices, weights, n)
    return _all_pairs_parallel(indptr, indices, weights, n)


def warmup() -> None:
    """Trigger JIT compilation on a toy instance (first call is slow otherwise)."""
    indptr = np.array([0, 1, 2], dtype=np.int64)
    indices = np.array([1, 0], dtype=np.int64)
    weights = np.array([1.0, 1.0], dtype=np.float64)
    sssp(indptr, indices, weights, 0, 2)
    _all_pairs_serial(indptr, indices, weights, 2)
    _all_pairs_parallel(indptr, indices, weights, 2)
