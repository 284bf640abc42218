"""Ring-construction MDP: states, legal actions, rewards, greedy rollout.

An episode builds K rings over all n nodes.  The walk head ``current`` moves
to each chosen node; when every node is visited the single remaining action
closes the cycle back to ``start`` and the next ring begins at a fresh seeded
start.  If the closing edge already exists from an earlier ring the closure
is a no-op (set semantics) and the episode advances without consuming a
step.  An empty action set mid-walk terminates the episode early (every
remaining candidate already linked to the head).

Rewards follow the diameter-difference scheme: each added edge (a, b) earns
(D_before - D_after) - alpha * w(a, b), with diameters taken on the largest
connected component and the empty topology pinned at 0, so per-episode
diameter terms telescope to -D(final).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graphs import LatencyMatrix, Ring, Topology
from ..paths import diameter
from ..rng import make_rng
from .network import StackedStates, embed_batch, q_all_actions
from .params import QModel

__all__ = [
    "EpisodeState",
    "legal_actions",
    "step_reward",
    "RingEpisode",
    "GreedyResult",
    "greedy_construct",
    "latency_scale",
    "stack_states",
]

_RING_START_STREAM = 0x52494E47  # namespaces the per-ring start-node draws


def latency_scale(w: LatencyMatrix, mode: str) -> float:
    """Normalization constant for network inputs (rewards always use raw ms).

    ``rowsum_mean`` divides by the mean row sum so that per-node latency
    aggregates are O(1) regardless of n; ``offdiag_mean`` divides by the mean
    entry only.
    """
    if mode == "rowsum_mean":
        return w.mean_offdiag() * (w.n - 1)
    if mode == "offdiag_mean":
        return w.mean_offdiag()
    if mode == "none":
        return 1.0
    raise ValueError(f"unknown latency_norm {mode!r}")


@dataclass(frozen=True, eq=False)
class EpisodeState:
    """Immutable snapshot of the construction MDP.

    ``w`` and ``wn`` (raw and normalized latencies) are shared references;
    the partial-solution arrays are private copies.
    """

    w: LatencyMatrix
    wn: np.ndarray
    adj: np.ndarray  # (n,n) bool
    degree: np.ndarray  # (n,) int64
    current: int
    visited: np.ndarray  # (n,) bool
    start: int
    ring_index: int
    k: int

    @property
    def n(self) -> int:
        return self.adj.shape[0]


def legal_actions(state: EpisodeState) -> np.ndarray:
    """Candidate target nodes, ascending; empty means the episode is over."""
    if state.ring_index >= state.k:
        return np.empty(0, dtype=np.int64)
    max_degree = 2 * state.k
    if state.degree[state.current] >= max_degree:
        return np.empty(0, dtype=np.int64)
    if state.visited.all():
        closing_ok = (
            state.current != state.start
            and not state.adj[state.current, state.start]
            and state.degree[state.start] < max_degree
        )
        if closing_ok:
            return np.array([state.start], dtype=np.int64)
        return np.empty(0, dtype=np.int64)
    mask = ~state.visited & ~state.adj[state.current] & (state.degree < max_degree)
    return np.flatnonzero(mask)


def step_reward(d_prev: float, d_next: float, edge_w: float, alpha: float) -> float:
    """(diameter drop) minus the latency penalty of the edge just added."""
    return (d_prev - d_next) - alpha * edge_w


def stack_states(states) -> StackedStates:
    """Stack snapshots into the array form the network consumes.

    Each snapshot carries its own normalized latencies (``wn``).
    """
    wn = np.stack([s.wn for s in states])
    adj = np.stack([s.adj for s in states]).astype(np.float64)
    deg = np.stack([s.degree for s in states]).astype(np.float64)
    current = np.array([s.current for s in states], dtype=np.int64)
    return StackedStates(wn=wn, adj=adj, deg=deg, current=current)


class RingEpisode:
    """Mutable episode; snapshots are taken per step for the replay buffer."""

    def __init__(
        self,
        w: LatencyMatrix,
        k: int,
        *,
        alpha: float = 0.1,
        ring_start_rng: np.random.Generator | None = None,
        track_reward: bool = True,
        latency_norm: str = "rowsum_mean",
        backend: str | None = None,
    ):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if w.n < 3:
            raise ValueError(f"ring episodes need n >= 3, got n={w.n}")
        self.w = w
        self.k = k
        self.alpha = alpha
        self.track_reward = track_reward
        self.backend = backend
        self.wn = w.values / latency_scale(w, latency_norm)
        self._ring_start_rng = ring_start_rng or make_rng(0, _RING_START_STREAM)
        self.reset(0)

    def reset(self, start: int) -> None:
        n = self.w.n
        if not (0 <= start < n):
            raise ValueError(f"start {start} out of range for n={n}")
        self.topo = Topology(n)
        self.visited = np.zeros(n, dtype=bool)
        self.visited[start] = True
        self.current = start
        self.start = start
        self.ring_index = 0
        self.diam = 0.0  # empty topology pinned at 0
        self.diam_delta_sum = 0.0
        self.steps = 0
        self.rings: list[Ring] = []
        self._ring_order = [start]
        self.early = False

    # -- state access --------------------------------------------------------

    @property
    def completed(self) -> bool:
        return self.ring_index >= self.k

    @property
    def done(self) -> bool:
        return self.completed or self.early

    def snapshot(self) -> EpisodeState:
        return EpisodeState(
            w=self.w,
            wn=self.wn,
            adj=self.topo.adj.copy(),
            degree=self.topo.degree.copy(),
            current=self.current,
            visited=self.visited.copy(),
            start=self.start,
            ring_index=self.ring_index,
            k=self.k,
        )

    def legal_actions(self) -> np.ndarray:
        if self.done:
            return np.empty(0, dtype=np.int64)
        acts = legal_actions(self.snapshot())
        if acts.shape[0] == 0:
            self.early = True
        return acts

    # -- transitions -----------------------------------------------------------

    def step(self, action: int) -> float:
        """Add edge (current, action); returns the reward (0 if untracked)."""
        if self.done:
            raise RuntimeError("episode already finished")
        action = int(action)
        closing = bool(self.visited.all())
        if closing and action != self.start:
            raise ValueError(f"only the closing edge to {self.start} is legal here")
        added = self.topo.add_edge(self.current, action)
        if not added:
            raise ValueError(f"edge ({self.current},{action}) already present")
        edge_w = float(self.w.values[self.current, action])
        reward = 0.0
        if self.track_reward:
            d_next = diameter(self.topo, self.w, self.backend)
            reward = step_reward(self.diam, d_next, edge_w, self.alpha)
            self.diam_delta_sum += self.diam - d_next
            self.diam = d_next
        self.steps += 1
        if closing:
            self._finish_ring()
        else:
            self.visited[action] = True
            self.current = action
            self._ring_order.append(action)
            if self.visited.all() and self.topo.has_edge(self.current, self.start):
                # closing edge already exists from an earlier ring: no-op close
                self._finish_ring()
        return reward

    def _finish_ring(self) -> None:
        self.rings.append(Ring(np.array(self._ring_order, dtype=np.int64)))
        self.ring_index += 1
        if self.ring_index >= self.k:
            return
        n = self.w.n
        start = int(self._ring_start_rng.integers(n))
        self.visited[:] = False
        self.visited[start] = True
        self.current = start
        self.start = start
        self._ring_order = [start]

    def final_diameter(self) -> float:
        """Largest-component diameter of the constructed topology (raw ms)."""
        if self.track_reward:
            return self.diam
        return diameter(self.topo, self.w, self.backend)


@dataclass(eq=False)
class GreedyResult:
    topology: Topology
    completed: bool
    rings: list[Ring]
    steps: int


def greedy_construct(
    w: LatencyMatrix,
    model: QModel,
    start: int,
    k: int,
    *,
    backend: str | None = None,
) -> GreedyResult:
    """Roll out the episode with pure argmax action selection.

    Deterministic for fixed (w, params, start): later ring starts come from a
    PCG64 stream keyed by ``start``.  Single-action steps (ring closure) skip
    network evaluation.  Early termination returns the partial topology with
    ``completed=False``.
    """
    env = RingEpisode(
        w,
        k,
        ring_start_rng=make_rng(start, _RING_START_STREAM),
        track_reward=False,
        latency_norm=model.latency_norm,
        backend=backend,
    )
    env.reset(start)
    while not env.done:
        acts = env.legal_actions()
        if acts.shape[0] == 0:
            break
        if acts.shape[0] == 1:
            env.step(int(acts[0]))
            continue
        stacked = stack_states([env.snapshot()])
        mu, _ = embed_batch(
            stacked, model.params, model.t_embed,
            model.theta2_scope, model.theta3_scope,
        )
        q = q_all_actions(stacked, mu, model.params)[0]
        best = acts[int(np.argmax(q[acts]))]  # argmax ties -> lowest id
        env.step(int(best))
    return GreedyResult(
        topology=env.topo, completed=env.completed, rings=env.rings, steps=env.steps
    )
