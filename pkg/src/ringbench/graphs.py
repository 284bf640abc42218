"""Core data model: latency matrices, overlay topologies, rings, degree bounds.

Node ids are dense integers ``0..n-1``.  A :class:`Topology` is an undirected
simple graph under construction (builder phase) or finished; a :class:`Ring`
is one Hamiltonian cycle given as a node order.  Latencies are symmetric
positive durations in milliseconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LatencyMatrix",
    "Topology",
    "Ring",
    "DegreeBound",
    "apply_ring",
    "check_degree",
]

SYMMETRY_TOL = 1e-9


class LatencyMatrix:
    """Symmetric n-by-n matrix of pairwise latencies (ms).

    Invariants: zero diagonal, symmetric within ``SYMMETRY_TOL``, strictly
    positive off-diagonal entries.  Immutable by convention after
    construction.
    """

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray, *, validate: bool = True):
        values = np.asarray(values, dtype=np.float64)
        if validate:
            self._check(values)
        self.values = values

    @staticmethod
    def _check(values: np.ndarray) -> None:
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"latency matrix must be square, got shape {values.shape}")
        n = values.shape[0]
        if n < 2:
            raise ValueError(f"latency matrix needs n >= 2, got n={n}")
        if not np.isfinite(values).all():
            raise ValueError("latency matrix contains non-finite entries")
        if np.abs(np.diagonal(values)).max() > 0:
            raise ValueError("latency matrix diagonal must be zero")
        asym = np.abs(values - values.T)
        if asym.max() > SYMMETRY_TOL:
            u, v = np.unravel_index(np.argmax(asym), asym.shape)
            raise ValueError(
                f"latency matrix asymmetric at ({u},{v}): "
                f"{values[u, v]!r} vs {values[v, u]!r}"
            )
        off = values[~np.eye(n, dtype=bool)]
        if off.min() <= 0:
            raise ValueError("off-diagonal latencies must be strictly positive")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def mean_offdiag(self) -> float:
        """Mean off-diagonal latency; the scale constant for network inputs."""
        n = self.n
        return float(self.values.sum() / (n * (n - 1)))

    def __repr__(self) -> str:
        return f"LatencyMatrix(n={self.n})"


class Topology:
    """Undirected simple graph over nodes ``0..n-1`` with degree tracking."""

    __slots__ = ("n", "adj", "degree", "_version", "_csr_version", "_csr_struct")

    def __init__(self, n: int):
        if n < 2:
            raise ValueError(f"topology needs n >= 2, got n={n}")
        self.n = n
        self.adj = np.zeros((n, n), dtype=bool)
        self.degree = np.zeros(n, dtype=np.int64)
        self._version = 0
        self._csr_version = -1
        self._csr_struct = None

    # -- construction ------------------------------------------------------

    def add_edge(self, u: int, v: int) -> bool:
        """Add undirected edge; returns False if it was already present."""
        if u == v:
            raise ValueError(f"self-loop at node {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
        if self.adj[u, v]:
            return False
        self.adj[u, v] = self.adj[v, u] = True
        self.degree[u] += 1
        self.degree[v] += 1
        self._version += 1
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        """Remove undirected edge; returns False if it was absent."""
        if not self.adj[u, v]:
            return False
        self.adj[u, v] = self.adj[v, u] = False
        self.degree[u] -= 1
        self.degree[v] -= 1
        self._version += 1
        return True

    def add_ring(self, ring: "Ring") -> None:
        """Union the ring's cycle edges into this topology, in place."""
        if ring.order.shape[0] != self.n:
            raise ValueError(
                f"ring over {ring.order.shape[0]} nodes applied to n={self.n}"
            )
        pairs = ring.edge_pairs()  # distinct unordered pairs, so bulk-safe
        u, v = pairs[:, 0], pairs[:, 1]
        fresh = ~self.adj[u, v]
        u, v = u[fresh], v[fresh]
        self.adj[u, v] = True
        self.adj[v, u] = True
        np.add.at(self.degree, u, 1)
        np.add.at(self.degree, v, 1)
        self._version += 1

    def copy(self) -> "Topology":
        t = Topology.__new__(Topology)
        t.n = self.n
        t.adj = self.adj.copy()
        t.degree = self.degree.copy()
        t._version = 0
        t._csr_version = -1
        t._csr_struct = None
        return t

    @classmethod
    def from_adjacency(cls, adj: np.ndarray) -> "Topology":
        adj = np.asarray(adj, dtype=bool)
        t = cls(adj.shape[0])
        if (adj != adj.T).any() or adj.diagonal().any():
            raise ValueError("adjacency must be symmetric with empty diagonal")
        t.adj = adj.copy()
        t.degree = adj.sum(axis=1).astype(np.int64)
        return t

    # -- queries -----------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adj[v])

    @property
    def edge_count(self) -> int:
        return int(self.degree.sum()) // 2

    def edge_array(self) -> np.ndarray:
        """(m, 2) int array of edges with u < v, lexicographically sorted."""
        u, v = np.nonzero(np.triu(self.adj, k=1))
        return np.column_stack([u, v])

    def csr(self, w: LatencyMatrix):
        """CSR view (indptr, indices, weights) with weights gathered from ``w``."""
        if w.n != self.n:
            raise ValueError(f"latency matrix n={w.n} does not match topology n={self.n}")
        if self._csr_struct is None or self._csr_version != self._version:
            rows, cols = np.nonzero(self.adj)
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(rows, minlength=self.n), out=indptr[1:])
            self._csr_struct = (indptr, cols.astype(np.int64), rows)
            self._csr_version = self._version
        indptr, cols, rows = self._csr_struct
        return indptr, cols, w.values[rows, cols]

    def component_labels(self) -> np.ndarray:
        """Connected-component label per node; labels are the lowest member id."""
        labels = np.full(self.n, -1, dtype=np.int64)
        for v in range(self.n):
            if labels[v] >= 0:
                continue
            frontier = np.zeros(self.n, dtype=bool)
            frontier[v] = True
            seen = frontier.copy()
            while frontier.any():
                frontier = self.adj[frontier].any(axis=0) & ~seen
                seen |= frontier
            labels[seen] = v
        return labels

    def component_count(self) -> int:
        return int(np.unique(self.component_labels()).shape[0])

    def is_connected(self) -> bool:
        return self.component_count() == 1

    def __repr__(self) -> str:
        return f"Topology(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True, eq=False)
class Ring:
    """One Hamiltonian cycle, stored as a cyclic node order."""

    order: np.ndarray

    def __post_init__(self):
        order = np.asarray(self.order, dtype=np.int64)
        object.__setattr__(self, "order", order)
        n = order.shape[0]
        if n < 3:
            raise ValueError(f"ring needs n >= 3, got {n}")
        if not np.array_equal(np.sort(order), np.arange(n)):
            raise ValueError("ring order must be a permutation of 0..n-1")

    @property
    def n(self) -> int:
        return self.order.shape[0]

    def edge_pairs(self) -> np.ndarray:
        """(n, 2) array of consecutive pairs, including the closing edge."""
        return np.column_stack([self.order, np.roll(self.order, -1)])

    def to_topology(self) -> Topology:
        t = Topology(self.n)
        t.add_ring(self)
        return t

    def tour_weight(self, w: LatencyMatrix) -> float:
        pairs = self.edge_pairs()
        return float(w.values[pairs[:, 0], pairs[:, 1]].sum())


@dataclass(frozen=True)
class DegreeBound:
    """Per-node cap of k rings, i.e. undirected degree at most 2k."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"degree bound k must be >= 1, got {self.k}")

    @classmethod
    def log2ceil(cls, n: int) -> "DegreeBound":
        return cls(max(2, math.ceil(math.log2(n))))

    @property
    def max_degree(self) -> int:
        return 2 * self.k


def apply_ring(topo: Topology, ring: Ring) -> Topology:
    """Union of ``topo`` and the ring's cycle edges (idempotent, non-mutating)."""
    out = topo.copy()
    out.add_ring(ring)
    return out


def check_degree(topo: Topology, bound: DegreeBound) -> bool:
    """True iff every node degree is within the 2k ring budget."""
    return bool((topo.degree <= bound.max_degree).all())
