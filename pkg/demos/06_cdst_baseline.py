"""Run the sparsification-triangulation heuristic and compare it with random-walk detection."""

from cdrw import (
    CdrwConfig,
    CdstConfig,
    PpmParams,
    detect_all,
    evaluate_assignment,
    generate_gnpq,
    ppm_analytic_conductance,
    run_cdst,
)

params = PpmParams(n_c=256, r=2, p=0.15, q=0.002, seed=11)
g, truth = generate_gnpq(params)
walk_f = evaluate_assignment(detect_all(g, CdrwConfig(delta=ppm_analytic_conductance(params))), truth).aggregate_f
print(f"random walks: F={walk_f:.3f}")
for alpha in (0.1, 0.3, 0.5):
    out = run_cdst(g, CdstConfig(alpha, seed=0))
    rep = evaluate_assignment(out, truth)
    print(f"sparsification alpha={alpha}: {len(out.communities)} communities, F={rep.aggregate_f:.3f}")
