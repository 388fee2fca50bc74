"""Follow a random walk from one vertex and watch the largest mixing set grow."""

import math

from cdrw import MixingSearchConfig, ProbVector, generate_gnp, l1_to_stationary, largest_mixing_set, mixing_time, walk_step

n = 1024
g = generate_gnp(n, 2 * math.log2(n) / n, seed=3)
p = ProbVector.delta(n, 0)
cfg = MixingSearchConfig()
print(f"threshold {cfg.epsilon_threshold:.4f}, growth {cfg.growth_factor:.4f}")
for ell in range(1, 9):
    p = walk_step(g, p)
    res = largest_mixing_set(g, p, cfg)
    size = "none" if res is None else res.size
    print(f"l={ell}: support={p.support.size:5d}  L1 to stationary={l1_to_stationary(g, p):.3f}  mixing set={size}")
print("global mixing time (eps=1/2e):", mixing_time(g, 0, 1 / (2 * math.e)))
