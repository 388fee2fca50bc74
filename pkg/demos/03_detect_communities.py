"""Detect one community from a seed, then partition the whole graph and score it."""

from cdrw import (
    CdrwConfig,
    PpmParams,
    detect_all,
    detect_community,
    evaluate_assignment,
    f_score,
    generate_gnpq,
    ppm_analytic_conductance,
)

params = PpmParams(n_c=512, r=3, p=0.04, q=0.0005, seed=2)
g, truth = generate_gnpq(params)
cfg = CdrwConfig(delta=ppm_analytic_conductance(params), seed=2)

one = detect_community(g, 0, cfg)
block = truth.blocks()[truth.labels[0]]
print(f"seed 0: {one.members.size} members, stopped at l={one.stop_step}, F={f_score(one.members, block):.3f}")
for rec in one.trace[-3:]:
    print("  trace", rec)

assignment = detect_all(g, cfg)
report = evaluate_assignment(assignment, truth)
print(f"{len(assignment.communities)} communities, aggregate F={report.aggregate_f:.3f} "
      f"Jaccard={report.aggregate_jaccard:.3f}")
for row in report.per_community:
    print("  ", {k: round(v, 3) if isinstance(v, float) else v for k, v in row.items()})
