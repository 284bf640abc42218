"""Partitioned ring construction: build per-partition open paths
concurrently-in-principle, stitch them into one Hamiltonian cycle.

Nodes are laid on a seeded random order and dealt to partitions by stride
(position i -> partition i mod m); the trailing n mod m positions are
leftovers.  Each partition builds an open path over its members with a
node-selection policy (nearest-neighbor or a trained Q model); paths are
stitched last(P_i) -> first(P_{i+1}), and each leftover node is spliced into
the stitch seam closest to it by latency (or appended after the last
partition with ``leftover_mode="append"``).

Per-partition closed local rings would give degree-3 stitch nodes, so
partitions build open paths and only the global cycle closes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .graphs import DegreeBound, LatencyMatrix, Ring, Topology
from .qlearn.env import RingEpisode
from .qlearn.network import embed_batch, q_all_actions
from .qlearn.params import QModel
from .rng import make_rng

__all__ = [
    "PartitionPlan",
    "make_partitions",
    "NearestNeighborSelector",
    "QGreedySelector",
    "parallel_ring",
    "parallel_k_ring",
]


@dataclass(frozen=True, eq=False)
class PartitionPlan:
    """Node-to-partition layout derived from one seeded order."""

    m: int
    parts: list[np.ndarray]  # member node ids per partition, in order dealt
    leftovers: np.ndarray
    mode: str  # "stride" or "block"

    @property
    def n(self) -> int:
        return sum(p.shape[0] for p in self.parts) + self.leftovers.shape[0]

    def assignment(self) -> np.ndarray:
        """Node id -> partition id, -1 for leftover nodes."""
        out = np.full(self.n, -1, dtype=np.int64)
        for i, part in enumerate(self.parts):
            out[part] = i
        return out


def make_partitions(
    n: int, m: int, seed: int, mode: str = "stride"
) -> PartitionPlan:
    """Deal a seeded random node order into m partitions plus leftovers."""
    if not (1 <= m <= n // 2) and not (m == 1 and n >= 2):
        raise ValueError(f"m must be in [1, n/2], got m={m} for n={n}")
    if mode not in ("stride", "block"):
        raise ValueError(f"mode must be 'stride' or 'block', got {mode!r}")
    order = make_rng(seed).permutation(n)
    per = n // m
    body, leftovers = order[: per * m], order[per * m :]
    if mode == "stride":
        parts = [body[i::m] for i in range(m)]
    else:
        parts = [body[i * per : (i + 1) * per] for i in range(m)]
    return PartitionPlan(m=m, parts=parts, leftovers=leftovers, mode=mode)


class PathSelector(Protocol):
    """Builds an open path over ``members`` starting at ``members[0]``."""

    def __call__(self, w: LatencyMatrix, members: np.ndarray) -> list[int]: ...


class NearestNeighborSelector:
    """Greedy walk within the partition; ties break toward the lowest id."""

    def __call__(self, w: LatencyMatrix, members: np.ndarray) -> list[int]:
        start = int(members[0])
        rest = np.sort(np.asarray(members[1:], dtype=np.int64))  # argmin tie -> low id
        path = [start]
        while rest.shape[0]:
            i = int(np.argmin(w.values[path[-1]][rest]))
            path.append(int(rest[i]))
            rest = np.delete(rest, i)
        return path


class QGreedySelector:
    """Argmax-Q walk within the partition.

    Embeddings see the full latency matrix with the partition's own path as
    the partial solution; candidate actions are restricted to unvisited
    partition members.
    """

    def __init__(self, model: QModel):
        self.model = model

    def __call__(self, w: LatencyMatrix, members: np.ndarray) -> list[int]:
        from .qlearn.env import stack_states

        env = RingEpisode(
            w, 1, track_reward=False, latency_norm=self.model.latency_norm
        )
        env.reset(int(members[0]))
        in_members = np.zeros(w.n, dtype=bool)
        in_members[members] = True
        path = [int(members[0])]
        while len(path) < members.shape[0]:
            acts = np.flatnonzero(in_members & ~env.visited)
            if acts.shape[0] == 1:
                best = int(acts[0])
            else:
                stacked = stack_states([env.snapshot()])
                mu, _ = embed_batch(
                    stacked, self.model.params, self.model.t_embed,
                    self.model.theta2_scope, self.model.theta3_scope,
                )
                q = q_all_actions(stacked, mu, self.model.params)[0]
                best = int(acts[int(np.argmax(q[acts]))])
            env.step(best)
            path.append(best)
        return path


def parallel_ring(
    w: LatencyMatrix,
    plan: PartitionPlan,
    selector: Callable[[LatencyMatrix, np.ndarray], list[int]],
    leftover_mode: str = "seam",
) -> Ring:
    """Stitch per-partition paths into one cycle, splicing in leftovers."""
    if plan.n != w.n:
        raise ValueError(f"plan covers {plan.n} nodes, matrix has {w.n}")
    if leftover_mode not in ("seam", "append"):
        raise ValueError(f"leftover_mode must be 'seam' or 'append', got {leftover_mode!r}")
    paths = [selector(w, part) for part in plan.parts]
    order: list[int] = []
    seams: list[int] = []  # order positions whose successor crosses a stitch
    for path in paths:
        order.extend(path)
        seams.append(len(order) - 1)  # last element of this partition

    for x in plan.leftovers:
        x = int(x)
        if leftover_mode == "append":
            order.append(x)
            seams[-1] = len(order) - 1
            continue
        best_seam = None
        best_cost = np.inf
        for si, pos in enumerate(seams):
            u = order[pos]
            v = order[(pos + 1) % len(order)]
            cost = min(w.values[x, u], w.values[x, v])
            if cost < best_cost:
                best_cost = cost
                best_seam = si
        pos = seams[best_seam]
        order.insert(pos + 1, x)
        # the two new crossings replace the old one
        seams[best_seam : best_seam + 1] = [pos, pos + 1]
        for i in range(best_seam + 2, len(seams)):
            seams[i] += 1
    return Ring(np.array(order, dtype=np.int64))


def parallel_k_ring(
    w: LatencyMatrix,
    k: DegreeBound | int,
    m: int,
    selector: Callable[[LatencyMatrix, np.ndarray], list[int]],
    seed: int,
    mode: str = "stride",
    leftover_mode: str = "seam",
) -> Topology:
    """Union of k stitched rings built from distinct partition seeds."""
    k = k.k if isinstance(k, DegreeBound) else int(k)
    topo = Topology(w.n)
    for i in range(k):
        plan = make_partitions(w.n, m, seed + i, mode)
        topo.add_ring(parallel_ring(w, plan, selector, leftover_mode))
    return topo
