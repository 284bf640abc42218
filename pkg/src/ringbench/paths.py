"""Weighted shortest paths and diameter over overlay topologies.

Distances use ``inf`` as the unreachable sentinel.  The diameter of a
disconnected graph is taken over its largest connected component, with ties
on component size broken by the lowest contained node id; an edgeless
topology has diameter 0 and is flagged degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .graphs import LatencyMatrix, Topology

__all__ = ["all_pairs_shortest", "diameter", "diameter_detail", "DiameterResult"]


def _kernels(backend: str | None):
    name = backend or _backend.backend_name()
    if name == "numba":
        from . import _kernels_numba as k
    else:
        from . import _kernels_numpy as k
    return k


def all_pairs_shortest(
    topo: Topology, w: LatencyMatrix, backend: str | None = None
) -> np.ndarray:
    """(n, n) matrix of shortest-path distances restricted to ``topo``'s edges.

    Unreachable pairs are ``inf``; the diagonal is 0.
    """
    if topo.n != w.n:
        raise ValueError(f"topology n={topo.n} does not match matrix n={w.n}")
    indptr, indices, weights = topo.csr(w)
    return _kernels(backend).all_pairs(indptr, indices, weights, topo.n)


@dataclass(frozen=True)
class DiameterResult:
    """Diameter restricted to the largest component.

    ``degenerate`` marks the edgeless case where 0 is returned by convention.
    ``component`` holds the node ids of the component the value was taken on.
    """

    value: float
    degenerate: bool
    component: np.ndarray


def diameter_detail(
    topo: Topology, w: LatencyMatrix, backend: str | None = None
) -> DiameterResult:
    if topo.edge_count == 0:
        return DiameterResult(0.0, True, np.arange(0, dtype=np.int64))
    dist = all_pairs_shortest(topo, w, backend)
    return _diameter_from_dist(dist)


def _diameter_from_dist(dist: np.ndarray) -> DiameterResult:
    finite = np.isfinite(dist)
    sizes = finite.sum(axis=1)
    best = int(np.argmax(sizes))  # argmax takes the lowest index on ties
    members = np.flatnonzero(finite[best])
    sub = dist[np.ix_(members, members)]
    return DiameterResult(float(sub.max()), False, members)


def diameter(topo: Topology, w: LatencyMatrix, backend: str | None = None) -> float:
    """Largest-component diameter; 0.0 for an edgeless topology."""
    return diameter_detail(topo, w, backend).value
