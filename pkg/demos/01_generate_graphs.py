"""Sample planted-partition graphs and compare edge counts with their expectations."""

import math

from cdrw import PpmParams, conductance_of_set, generate_gnpq, ppm_analytic_conductance

params = PpmParams(n_c=1024, r=2, p=20 / 1024, q=0.6 / 1024, seed=1)
g, truth = generate_gnpq(params)
e = g.edges
same = truth.labels[e[:, 0]] == truth.labels[e[:, 1]]

print(f"n={g.n} m={g.m}")
print(f"intra edges per block: {same.sum() / 2:.0f}  (expected {math.comb(1024, 2) * params.p:.0f})")
print(f"inter edges: {(~same).sum()}  (expected {1024 * 1024 * params.q:.0f})")
for b, block in enumerate(truth.blocks()):
    print(f"block {b}: conductance {conductance_of_set(g, block):.4f}")
print(f"analytic conductance: {ppm_analytic_conductance(params):.4f}")
