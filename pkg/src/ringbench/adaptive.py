"""Self-adaptive ring selection from gossip-measured latency statistics.

Each node samples latencies to a few of its overlay neighbors (local view)
and to uniformly random peers (global view), then a synchronous push-sum
gossip averages the three statistics network-wide.  The dispersion ratio

    rho = (avg_local - avg_min) / (avg_global - avg_min)

is near 0 when overlay links are already close to the best available
(clustered topology) and near 1 when they look no better than random peers.
A clustered overlay gets a random ring to cut across clusters; a random
overlay gets a shortest (nearest-neighbor) ring to tighten it; mid-range
keeps the topology.  ``invert=True`` flips the two ring kinds for fidelity
experiments with the opposite convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import LatencyMatrix, Ring, Topology, apply_ring
from .overlays import RingKind, nearest_neighbor_ring, random_ring
from .rng import make_rng

__all__ = [
    "NodeStats",
    "AggregateStats",
    "SwapDecision",
    "AddRandomRing",
    "AddShortestRing",
    "Keep",
    "measure_node",
    "measure_all",
    "gossip_aggregate",
    "rho",
    "select_ring_action",
    "decide",
    "apply_decision",
    "RingInventory",
    "apply_decision_replace",
]

AddRandomRing = "add-random-ring"
AddShortestRing = "add-shortest-ring"
Keep = "keep"

DEGENERATE_SPREAD = 1e-9


@dataclass(frozen=True)
class NodeStats:
    """One node's sampled latency view."""

    l_local: float
    l_global: float
    l_min: float

    def __post_init__(self):
        if self.l_min > self.l_global:
            raise ValueError(
                f"l_min {self.l_min} exceeds l_global {self.l_global}"
            )


@dataclass(frozen=True)
class AggregateStats:
    avg_local: float
    avg_global: float
    avg_min: float
    message_count: int


@dataclass(frozen=True)
class SwapDecision:
    action: str
    rho: float


def measure_node(
    u: int, topo: Topology, w: LatencyMatrix, k_samples: int, seed: int
) -> NodeStats:
    """Sample k neighbors (with replacement) and k uniform non-self peers."""
    if k_samples < 1:
        raise ValueError(f"k_samples must be >= 1, got {k_samples}")
    neighbors = topo.neighbors(u)
    if neighbors.shape[0] == 0:
        raise ValueError(f"node {u} is isolated; cannot sample neighbors")
    rng = make_rng(seed, u)
    local = w.values[u, rng.choice(neighbors, size=k_samples, replace=True)]
    others = np.concatenate([np.arange(u), np.arange(u + 1, topo.n)])
    globl = w.values[u, rng.choice(others, size=k_samples, replace=True)]
    return NodeStats(
        l_local=float(local.mean()),
        l_global=float(globl.mean()),
        l_min=float(globl.min()),
    )


def default_samples(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


def measure_all(
    topo: Topology, w: LatencyMatrix, k_samples: int, seed: int
) -> list[NodeStats]:
    return [measure_node(u, topo, w, k_samples, seed) for u in range(topo.n)]


def gossip_aggregate(
    stats: list[NodeStats], topo: Topology, rounds: int, seed: int
) -> AggregateStats:
    """Synchronous push-sum averaging of the per-node statistics.

    Every round each node keeps half of its running (sums, weight) mass and
    pushes the other half to one random neighbor; all sends within a round
    read the previous round's snapshot.  The reported averages are the mean
    of per-node estimates, which converges to the exact means; on a
    disconnected topology each component converges to its own mean.
    """
    n = topo.n
    if len(stats) != n:
        raise ValueError(f"{len(stats)} stats records for n={n}")
    if rounds < 0:
        raise ValueError(f"rounds must be >= 0, got {rounds}")
    rng = make_rng(seed)
    mass = np.ones((n, 4))
    mass[:, 0] = [s.l_local for s in stats]
    mass[:, 1] = [s.l_global for s in stats]
    mass[:, 2] = [s.l_min for s in stats]

    neighbor_lists = [topo.neighbors(u) for u in range(n)]
    messages = 0
    for _ in range(rounds):
        outgoing = np.zeros_like(mass)
        for u in range(n):
            nbrs = neighbor_lists[u]
            if nbrs.shape[0] == 0:
                continue
            target = int(nbrs[rng.integers(nbrs.shape[0])])
            outgoing[target] += mass[u] * 0.5
            mass[u] *= 0.5
            messages += 1
        mass += outgoing
    estimates = mass[:, :3] / mass[:, 3:4]
    avg = estimates.mean(axis=0)
    return AggregateStats(
        avg_local=float(avg[0]),
        avg_global=float(avg[1]),
        avg_min=float(avg[2]),
        message_count=messages,
    )


def exact_aggregate(stats: list[NodeStats]) -> AggregateStats:
    """Centralized oracle for the gossip output (exact arithmetic means)."""
    return AggregateStats(
        avg_local=float(np.mean([s.l_local for s in stats])),
        avg_global=float(np.mean([s.l_global for s in stats])),
        avg_min=float(np.mean([s.l_min for s in stats])),
        message_count=0,
    )


def rho(agg: AggregateStats) -> float:
    """Dispersion ratio; NaN when the network is latency-degenerate."""
    spread = agg.avg_global - agg.avg_min
    if spread < DEGENERATE_SPREAD:
        return float("nan")
    return (agg.avg_local - agg.avg_min) / spread


def select_ring_action(
    rho_value: float, threshold: float, invert: bool = False
) -> SwapDecision:
    """Three-way rule on rho; boundary values and NaN map to Keep."""
    if not (0.0 < threshold < 0.5):
        raise ValueError(f"threshold must be in (0, 0.5), got {threshold}")
    if math.isnan(rho_value):
        return SwapDecision(Keep, rho_value)
    low, high = AddRandomRing, AddShortestRing
    if invert:
        low, high = high, low
    if rho_value < threshold:
        return SwapDecision(low, rho_value)
    if rho_value > 1.0 - threshold:
        return SwapDecision(high, rho_value)
    return SwapDecision(Keep, rho_value)


def decide(agg: AggregateStats, threshold: float, invert: bool = False) -> SwapDecision:
    return select_ring_action(rho(agg), threshold, invert)


def _build_ring(kind: str, w: LatencyMatrix, seed: int) -> Ring:
    if kind == AddRandomRing:
        return random_ring(w.n, seed)
    start = int(make_rng(seed, 0x4E4E).integers(w.n))
    return nearest_neighbor_ring(w, start)


def apply_decision(
    topo: Topology, w: LatencyMatrix, decision: SwapDecision, seed: int
) -> Topology:
    """Grow mode: union the decided ring into the topology (Keep: unchanged)."""
    if decision.action == Keep:
        return topo.copy()
    return apply_ring(topo, _build_ring(decision.action, w, seed))


@dataclass(eq=False)
class RingInventory:
    """Ring provenance for replace-mode swaps: the K rings a protocol owns."""

    n: int
    rings: list[tuple[str, Ring]]

    def to_topology(self) -> Topology:
        topo = Topology(self.n)
        for _, ring in self.rings:
            topo.add_ring(ring)
        return topo

    @classmethod
    def random_k(cls, n: int, k: int, seed: int) -> "RingInventory":
        return cls(n, [(RingKind.RANDOM, random_ring(n, seed + i)) for i in range(k)])


def apply_decision_replace(
    inv: RingInventory, w: LatencyMatrix, decision: SwapDecision, seed: int
) -> RingInventory:
    """Replace mode: swap out the most recent ring of the opposite kind.

    Keeps the ring count (and so the 2K degree budget) fixed.  If no ring of
    the opposite kind exists, the new ring is appended instead.
    """
    if decision.action == Keep:
        return RingInventory(inv.n, list(inv.rings))
    new_kind = (
        RingKind.RANDOM if decision.action == AddRandomRing else RingKind.NEAREST_NEIGHBOR
    )
    opposite = (
        RingKind.NEAREST_NEIGHBOR if new_kind == RingKind.RANDOM else RingKind.RANDOM
    )
    rings = list(inv.rings)
    for i in range(len(rings) - 1, -1, -1):
        if rings[i][0] == opposite:
            del rings[i]
            break
    rings.append((new_kind, _build_ring(decision.action, w, seed)))
    return RingInventory(inv.n, rings)
