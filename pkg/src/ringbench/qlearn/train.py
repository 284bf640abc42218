"""One-step Q-learning with experience replay for ring construction.

Each epoch draws a fresh latency matrix, rolls one epsilon-greedy episode,
pushes per-step transitions, and performs one plain-SGD step on the
batch-mean squared TD error after every episode step (once the buffer holds
a full batch).  Targets are ``r + gamma * max_a' Q(s', a')`` over the legal
actions of s', computed with the live parameters; terminal transitions use
``r`` alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..latency import gen_gaussian, gen_uniform
from ..rng import derive_seed, make_rng
from .env import RingEpisode, legal_actions, stack_states
from .network import embed_batch, loss_and_grads, q_all_actions
from .params import EmbedParams, QModel
from .replay import ReplayBuffer, Transition

__all__ = ["TrainConfig", "TrainLog", "TrainResult", "TrainingDiverged",
           "epsilon_schedule", "train"]

_MATRIX_STREAM = 0x4D415452
_PARAM_STREAM = 0x494E4954


class TrainingDiverged(FloatingPointError):
    """Loss or parameters went non-finite; carries the epoch/step diagnostic."""


def epsilon_schedule(epoch: int) -> float:
    """Exploration rate: linear decay from 1 to the 0.05 floor over 2000 epochs."""
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    return max(1.0 - epoch / 2000.0, 0.05)


@dataclass
class TrainConfig:
    n_nodes: int
    k_rings: int
    epochs: int = 10_000
    batch: int = 32
    lr: float = 5e-4
    gamma: float = 1.0
    alpha_latency: float = 0.1
    t_embed: int = 4
    seed: int = 0
    p: int = 16
    hidden: int = 32
    replay_capacity: int = 10**6
    distribution: str = "uniform"  # or "gaussian"
    theta2_scope: str = "partial"
    theta3_scope: str = "all"
    latency_norm: str = "rowsum_mean"
    grad_clip: float = 100.0  # L2 cap on the batch-mean gradient; 0 disables

    def __post_init__(self):
        if self.n_nodes < 3:
            raise ValueError(f"n_nodes must be >= 3, got {self.n_nodes}")
        for name in ("k_rings", "epochs", "batch", "t_embed", "p", "hidden",
                     "replay_capacity"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.lr < 0:
            raise ValueError(f"lr must be >= 0, got {self.lr}")
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.distribution not in ("uniform", "gaussian"):
            raise ValueError(f"unknown distribution {self.distribution!r}")

    def draw_matrix(self, epoch: int):
        seed = derive_seed(self.seed, _MATRIX_STREAM, epoch)
        if self.distribution == "uniform":
            return gen_uniform(self.n_nodes, seed)
        return gen_gaussian(self.n_nodes, seed)


@dataclass
class TrainLog:
    """Per-epoch episode telemetry."""

    final_diameter: list[float] = field(default_factory=list)
    diam_delta_sum: list[float] = field(default_factory=list)
    mean_loss: list[float] = field(default_factory=list)
    epsilon: list[float] = field(default_factory=list)
    early_terminated: list[bool] = field(default_factory=list)

    def smoothed_diameter(self, window: int = 200) -> np.ndarray:
        d = np.asarray(self.final_diameter)
        if d.shape[0] < window:
            return d.copy()
        kernel = np.ones(window) / window
        return np.convolve(d, kernel, mode="valid")


@dataclass(eq=False)
class TrainResult:
    model: QModel
    log: TrainLog


def _batch_targets(batch, gamma: float, params: EmbedParams, cfg: TrainConfig):
    """TD targets; bootstrap term masked out on terminal transitions."""
    targets = np.array([t.reward for t in batch])
    boot = [i for i, t in enumerate(batch) if not t.terminal]
    if boot:
        nxt = [batch[i].next_state for i in boot]
        stacked = stack_states(nxt)
        mu, _ = embed_batch(stacked, params, cfg.t_embed,
                            cfg.theta2_scope, cfg.theta3_scope)
        q = q_all_actions(stacked, mu, params)
        for j, i in enumerate(boot):
            acts = legal_actions(batch[i].next_state)
            targets[i] += gamma * float(q[j, acts].max())
    return targets


def _sgd_update(batch, params: EmbedParams, cfg: TrainConfig) -> float:
    """One step on the batch-mean squared TD error; returns the summed loss.

    The batch-mean gradient is L2-clipped at ``cfg.grad_clip``: bootstrapped
    targets under plain SGD occasionally produce explosive batches, and an
    unbounded step sends the whole run non-finite.
    """
    targets = _batch_targets(batch, cfg.gamma, params, cfg)
    stacked = stack_states([t.state for t in batch])
    actions = np.array([t.action for t in batch], dtype=np.int64)
    loss, grads = loss_and_grads(
        stacked, actions, targets, params, cfg.t_embed,
        cfg.theta2_scope, cfg.theta3_scope,
    )
    if not np.isfinite(loss):
        raise TrainingDiverged(f"non-finite loss {loss!r}")
    lr = cfg.lr / len(batch)
    if cfg.grad_clip > 0:
        gnorm = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
        gnorm /= len(batch)
        if gnorm > cfg.grad_clip:
            lr *= cfg.grad_clip / gnorm
    params.sgd_step(grads, lr)
    return loss


def train(cfg: TrainConfig, *, backend: str | None = None) -> TrainResult:
    """Run the full training schedule; returns the model and per-epoch log."""
    params = EmbedParams.init_random(
        cfg.p, cfg.hidden, derive_seed(cfg.seed, _PARAM_STREAM)
    )
    model = QModel(
        params=params,
        t_embed=cfg.t_embed,
        theta2_scope=cfg.theta2_scope,
        theta3_scope=cfg.theta3_scope,
        latency_norm=cfg.latency_norm,
    )
    buffer = ReplayBuffer(cfg.replay_capacity)
    explore_rng = make_rng(cfg.seed, 0x45585052)
    sample_rng = make_rng(cfg.seed, 0x53414D50)
    log = TrainLog()

    for epoch in range(cfg.epochs):
        w = cfg.draw_matrix(epoch)
        eps = epsilon_schedule(epoch)
        env = RingEpisode(
            w,
            cfg.k_rings,
            alpha=cfg.alpha_latency,
            ring_start_rng=make_rng(cfg.seed, 0x53545254, epoch),
            track_reward=True,
            latency_norm=cfg.latency_norm,
            backend=backend,
        )
        env.reset(int(explore_rng.integers(cfg.n_nodes)))
        losses = []
        while not env.done:
            acts = env.legal_actions()
            if acts.shape[0] == 0:
                break
            state = env.snapshot()
            if acts.shape[0] == 1:
                action = int(acts[0])  # forced move: skip scoring
            elif explore_rng.random() < eps:
                action = int(acts[explore_rng.integers(acts.shape[0])])
            else:
                stacked = stack_states([state])
                mu, _ = embed_batch(stacked, params, cfg.t_embed,
                                    cfg.theta2_scope, cfg.theta3_scope)
                q = q_all_actions(stacked, mu, params)[0]
                action = int(acts[int(np.argmax(q[acts]))])

            reward = env.step(action)
            next_state = env.snapshot()
            terminal = env.completed or env.legal_actions().shape[0] == 0
            buffer.push(Transition(state, action, reward, next_state, terminal))

            if len(buffer) >= cfg.batch:
                try:
                    losses.append(_sgd_update(buffer.sample(sample_rng, cfg.batch),
                                              params, cfg))
                except FloatingPointError as e:
                    raise TrainingDiverged(
                        f"epoch {epoch}, episode step {env.steps}: {e}"
                    ) from None

        log.final_diameter.append(env.final_diameter())
        log.diam_delta_sum.append(env.diam_delta_sum)
        log.mean_loss.append(float(np.mean(losses)) if losses else float("nan"))
        log.epsilon.append(eps)
        log.early_terminated.append(env.early)

    return TrainResult(model=model, log=log)
