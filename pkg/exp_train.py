"""Scratch experiment: training variants for the n=20 K=2 target.

Not part of the package; removed before delivery.
"""
import sys
import time

import numpy as np

from ringbench import gen_uniform, rapid_k_ring, diameter
from ringbench.qlearn import TrainConfig, EmbedParams
from ringbench.qlearn.train import train
import ringbench.qlearn.train as trainmod

variant = sys.argv[1]
epochs = int(sys.argv[2]) if len(sys.argv) > 2 else 600

orig_init = EmbedParams.init_random.__func__


def damped(cls, p, h, seed):
    params = orig_init(cls, p, h, seed)
    params.theta2 *= 0.25
    params.theta5 *= 0.25
    return params


EmbedParams.init_random = classmethod(damped)

kw = dict(n_nodes=20, k_rings=2, epochs=epochs, seed=0)
if variant == "mean":
    pass
elif variant == "sum":
    kw["lr"] = 5e-4 * 32
elif variant == "mid":
    kw["lr"] = 5e-4 * 8
elif variant == "gamma9":
    kw["gamma"] = 0.9
elif variant == "alpha02":
    kw["alpha_latency"] = 0.02
else:
    raise SystemExit(f"unknown variant {variant}")

cfg = TrainConfig(**kw)
t0 = time.time()
try:
    result = train(cfg)
except Exception as e:
    print(f"{variant}: DIVERGED {type(e).__name__}: {e}")
    raise SystemExit

log = np.array(result.log.final_diameter)
chunks = [f"{log[i:i+epochs//5].mean():.1f}" for i in range(0, epochs, epochs // 5)]
print(f"{variant}: {time.time()-t0:.0f}s, episode-diam chunks {chunks}, "
      f"loss tail {np.nanmean(result.log.mean_loss[-100:]):.1f}, "
      f"early {sum(result.log.early_terminated)}")

from ringbench.qlearn import greedy_construct

w = gen_uniform(20, 12345)
rand_median = float(np.median([diameter(rapid_k_ring(20, 2, s), w) for s in range(100)]))
starts = np.random.default_rng(7).choice(20, size=10, replace=False)
best = np.inf
ncomp = 0
for s in starts:
    res = greedy_construct(w, result.model, int(s), 2)
    if res.completed:
        ncomp += 1
        best = min(best, diameter(res.topology, w))
print(f"{variant}: best-of-10 {best} (completed {ncomp}/10), random median {rand_median}, "
      f"ratio {best / rand_median:.3f} (target <= 0.8)")
