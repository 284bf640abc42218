"""Scratch: seed sensitivity of the criterion-5 training recipe."""
import sys, time
import numpy as np
from ringbench import gen_uniform, rapid_k_ring, diameter
from ringbench.qlearn import TrainConfig, greedy_construct
from ringbench.qlearn.train import train

seed = int(sys.argv[1])
epochs = int(sys.argv[2])
cfg = TrainConfig(n_nodes=20, k_rings=2, epochs=epochs, lr=4e-3, seed=seed)
t0 = time.time()
try:
    result = train(cfg)
except Exception as e:
    print(f"seed {seed}: DIVERGED {e}")
    raise SystemExit
w = gen_uniform(20, 12345)
rand_median = float(np.median([diameter(rapid_k_ring(20, 2, s), w) for s in range(100)]))
starts = np.random.default_rng(7).choice(20, size=10, replace=False)
best = np.inf; ncomp = 0
for s in starts:
    res = greedy_construct(w, result.model, int(s), 2)
    if res.completed:
        ncomp += 1
        best = min(best, diameter(res.topology, w))
log = np.array(result.log.final_diameter)
print(f"seed {seed}: {time.time()-t0:.0f}s best-of-10 {best} ({ncomp}/10 done) "
      f"ratio {best/rand_median:.3f} tail-diam {log[-150:].mean():.1f} early {sum(result.log.early_terminated)}")
