import numpy as np
import pytest

from ringbench import gen_uniform
from ringbench.qlearn import (
    EmbedParams,
    ReplayBuffer,
    TrainConfig,
    Transition,
    epsilon_schedule,
    train,
)
from ringbench.qlearn.env import RingEpisode
from ringbench.qlearn.train import _sgd_update


def test_epsilon_schedule_values():
    assert epsilon_schedule(0) == 1.0
    assert epsilon_schedule(1000) == 0.5
    assert epsilon_schedule(5000) == 0.05
    assert epsilon_schedule(2000) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        epsilon_schedule(-1)


def test_replay_buffer_fifo_eviction():
    buf = ReplayBuffer(capacity=3)
    for i in range(5):
        buf.push(Transition(None, i, 0.0, None, False))
    assert len(buf) == 3
    assert [t.action for t in buf] == [2, 3, 4]


def test_replay_buffer_capacity_never_exceeded():
    buf = ReplayBuffer(capacity=10)
    for i in range(100):
        buf.push(Transition(None, i, 0.0, None, False))
        assert len(buf) <= 10


def test_replay_sample_with_replacement():
    buf = ReplayBuffer(capacity=4)
    for i in range(4):
        buf.push(Transition(None, i, 0.0, None, False))
    rng = np.random.default_rng(0)
    picks = buf.sample(rng, 100)
    assert len(picks) == 100
    assert {t.action for t in picks} <= {0, 1, 2, 3}


def test_zero_lr_leaves_params_unchanged():
    cfg = TrainConfig(n_nodes=6, k_rings=1, epochs=3, batch=4, lr=0.0,
                      p=4, hidden=8, seed=1)
    ref = EmbedParams.init_random(4, 8, seed=0)  # any params; compare to init
    result = train(cfg)
    init = EmbedParams.init_random(4, 8, seed=0)
    # params must equal their own initialization, untouched by updates
    from ringbench.rng import derive_seed
    from ringbench.qlearn.train import _PARAM_STREAM

    want = EmbedParams.init_random(4, 8, derive_seed(cfg.seed, _PARAM_STREAM))
    for name, arr in result.model.params.blocks().items():
        assert np.array_equal(arr, getattr(want, name)), name


def collect_transitions(n=6, k=1, seed=0, count=8):
    env = RingEpisode(gen_uniform(n, seed), k, alpha=0.1)
    env.reset(0)
    rng = np.random.default_rng(seed)
    out = []
    while not env.done and len(out) < count:
        acts = env.legal_actions()
        if acts.shape[0] == 0:
            break
        a = int(acts[rng.integers(acts.shape[0])])
        s = env.snapshot()
        r = env.step(a)
        out.append(Transition(s, a, r, env.snapshot(),
                              env.completed or env.legal_actions().shape[0] == 0))
    return out


def test_single_transition_regression_converges():
    # a terminal transition turns the update into plain regression onto r:
    # repeated steps on the same batch drive the loss to 0
    t = collect_transitions(count=1)[0]
    cfg = TrainConfig(n_nodes=6, k_rings=1, epochs=1, batch=1, lr=5e-2,
                      gamma=1.0, p=4, hidden=8, seed=3, grad_clip=0.0)
    # seed chosen so the tiny net has live relu paths for this single state
    params = EmbedParams.init_random(4, 8, seed=0)
    batch = [Transition(t.state, t.action, t.reward, t.next_state, True)]
    losses = [_sgd_update(batch, params, cfg) for _ in range(2000)]
    assert losses[-1] < 1e-6 * max(losses[0], 1e-12)
    assert losses[-1] <= losses[0]


def test_training_smoke_run_and_log_shapes():
    cfg = TrainConfig(n_nodes=8, k_rings=2, epochs=12, batch=8,
                      p=4, hidden=8, seed=5)
    result = train(cfg)
    log = result.log
    assert len(log.final_diameter) == 12
    assert len(log.diam_delta_sum) == 12
    assert len(log.epsilon) == 12
    assert all(np.isfinite(log.final_diameter))
    assert result.model.params.p == 4


def test_training_telescoping_invariant():
    cfg = TrainConfig(n_nodes=8, k_rings=2, epochs=10, batch=8,
                      p=4, hidden=8, seed=6)
    result = train(cfg)
    for dsum, final in zip(result.log.diam_delta_sum, result.log.final_diameter):
        assert abs(dsum - (0.0 - final)) <= 1e-9


def test_training_deterministic_per_seed():
    cfg = TrainConfig(n_nodes=6, k_rings=1, epochs=5, batch=4,
                      p=4, hidden=8, seed=9)
    r1 = train(cfg)
    r2 = train(cfg)
    for name, arr in r1.model.params.blocks().items():
        assert np.array_equal(arr, getattr(r2.model.params, name)), name
    assert r1.log.final_diameter == r2.log.final_diameter


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(n_nodes=2, k_rings=1)
    with pytest.raises(ValueError):
        TrainConfig(n_nodes=8, k_rings=1, gamma=0.0)
    with pytest.raises(ValueError):
        TrainConfig(n_nodes=8, k_rings=1, distribution="cauchy")
