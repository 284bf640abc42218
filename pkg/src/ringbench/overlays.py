"""Baseline overlay builders: random and nearest-neighbor rings, K-ring
unions, Chord-style finger graphs, and Perigee-style nearest-peer graphs.

All builders are pure functions of (inputs, seed).  Rings from different
sub-seeds may share edges; unions use set semantics, so node degree never
exceeds twice the number of contributing rings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import DegreeBound, LatencyMatrix, Ring, Topology
from .rng import derive_seed, make_rng

__all__ = [
    "RingKind",
    "OverlaySpec",
    "random_ring",
    "nearest_neighbor_ring",
    "rapid_k_ring",
    "k_ring_mix",
    "chord_topology",
    "perigee_topology",
]


class RingKind:
    RANDOM = "random"
    NEAREST_NEIGHBOR = "nearest-neighbor"


@dataclass(frozen=True)
class OverlaySpec:
    """Parameter record for the K-ring-mix builder family.

    ``mix`` is (m_random, m_shortest) and must sum to ``k.k`` for KRingMix.
    """

    method: str
    n: int
    k: DegreeBound
    mix: tuple[int, int] | None = None


def random_ring(n: int, seed: int) -> Ring:
    """Uniformly random cyclic order via seeded shuffle."""
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    return Ring(make_rng(seed).permutation(n))


def nearest_neighbor_ring(w: LatencyMatrix, start: int = 0) -> Ring:
    """Greedy tour: repeatedly hop to the closest unvisited node.

    Ties break toward the lowest node id; the final edge closes back to
    ``start``.
    """
    n = w.n
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    if not (0 <= start < n):
        raise ValueError(f"start {start} out of range for n={n}")
    order = np.empty(n, dtype=np.int64)
    order[0] = start
    visited = np.zeros(n, dtype=bool)
    visited[start] = True
    cur = start
    for i in range(1, n):
        row = np.where(visited, np.inf, w.values[cur])
        cur = int(np.argmin(row))
        order[i] = cur
        visited[cur] = True
    return Ring(order)


def _nearest_neighbor_ring_avoiding(
    w: LatencyMatrix, start: int, existing: Topology
) -> Ring:
    """Greedy tour that prefers candidates not already linked to the current
    node in ``existing``; falls back to the plain nearest when all remaining
    candidates collide (duplicate edges are then absorbed by set union)."""
    n = w.n
    order = np.empty(n, dtype=np.int64)
    order[0] = start
    visited = np.zeros(n, dtype=bool)
    visited[start] = True
    cur = start
    for i in range(1, n):
        row = np.where(visited, np.inf, w.values[cur])
        fresh = np.where(existing.adj[cur], np.inf, row)
        cur = int(np.argmin(fresh)) if np.isfinite(fresh).any() else int(np.argmin(row))
        order[i] = cur
        visited[cur] = True
    return Ring(order)


def rapid_k_ring(n: int, k: DegreeBound | int, seed: int) -> Topology:
    """Union of k independent random rings (sub-seeds seed+i)."""
    if n < 3:
        raise ValueError(f"k-ring needs n >= 3, got {n}")
    k = k.k if isinstance(k, DegreeBound) else int(k)
    topo = Topology(n)
    for i in range(k):
        topo.add_ring(random_ring(n, seed + i))
    return topo


def k_ring_mix(w: LatencyMatrix, spec: OverlaySpec, seed: int) -> Topology:
    """Union of m_random random rings and m_shortest greedy rings.

    Greedy rings start from distinct nodes of a seeded shuffle and dodge
    edges already present where possible.
    """
    if spec.method != "kringmix":
        raise ValueError(f"k_ring_mix got spec.method={spec.method!r}")
    if spec.mix is None:
        raise ValueError("k_ring_mix needs spec.mix=(m_random, m_shortest)")
    m_random, m_shortest = spec.mix
    if m_random < 0 or m_shortest < 0:
        raise ValueError(f"mix counts must be non-negative, got {spec.mix}")
    n = w.n
    if m_shortest > n - 1:
        raise ValueError(f"cannot place {m_shortest} shortest rings over n={n} nodes")
    topo = Topology(n)
    for i in range(m_random):
        topo.add_ring(random_ring(n, seed + i))
    starts = make_rng(seed, 0x5354).permutation(n)
    for j in range(m_shortest):
        topo.add_ring(_nearest_neighbor_ring_avoiding(w, int(starts[j]), topo))
    return topo


def chord_topology(n: int, seed: int, order: np.ndarray | None = None) -> Topology:
    """Chord-style graph: successor ring plus power-of-two finger edges.

    Nodes are placed on the identifier circle by a seeded random permutation
    (or an explicit ``order``); node at position i links to positions i+1 and
    i + 2^j for j = 1..floor(log2 n)-1, undirected.
    """
    if n < 4:
        raise ValueError(f"chord needs n >= 4, got {n}")
    if order is None:
        perm = make_rng(seed).permutation(n)
    else:
        perm = np.asarray(order, dtype=np.int64)
        if not np.array_equal(np.sort(perm), np.arange(n)):
            raise ValueError("order must be a permutation of 0..n-1")
    topo = Topology(n)
    offsets = [1] + [2**j for j in range(1, int(math.log2(n)))]
    for i in range(n):
        for off in offsets:
            topo.add_edge(int(perm[i]), int(perm[(i + off) % n]))
    return topo


def perigee_topology(w: LatencyMatrix, d_out: int) -> Topology:
    """Every node proposes links to its d_out lowest-latency peers.

    Proposals are unioned undirected; connectivity is NOT guaranteed (two
    distant clusters each keep their links internal).
    """
    n = w.n
    if not (1 <= d_out < n):
        raise ValueError(f"d_out must be in [1, n), got {d_out} for n={n}")
    topo = Topology(n)
    masked = w.values + np.where(np.eye(n, dtype=bool), np.inf, 0.0)
    # stable argsort keeps the lowest-id winner on latency ties
    nearest = np.argsort(masked, axis=1, kind="stable")[:, :d_out]
    for u in range(n):
        for v in nearest[u]:
            topo.add_edge(u, int(v))
    return topo
