"""Convert a CONGEST run into k-machine round estimates under a random vertex partition."""

from cdrw import (
    CdrwConfig,
    PpmParams,
    conversion_estimate,
    cross_machine_messages,
    generate_gnpq,
    ppm_analytic_conductance,
    rvp_partition,
    run_cdrw_congest,
)

params = PpmParams(n_c=512, r=2, p=0.03, q=0.0005, seed=4)
g, _ = generate_gnpq(params)
_, led = run_cdrw_congest(g, 0, CdrwConfig(delta=ppm_analytic_conductance(params), seed=4))
dmax = int(g.degrees.max())
print(f"M={led.messages} T={led.rounds} max degree={dmax}")
for k in (2, 4, 8, 16):
    part = rvp_partition(g, k, seed=k)
    cross = cross_machine_messages(g, part, led)
    est = conversion_estimate(led.messages, led.rounds, dmax, k, n=g.n, r=2, p=params.p, q=params.q)
    print(f"k={k:2d}: estimate={est.estimate:12.1f}  sbm form={est.sbm_form:10.1f}  "
          f"cross-machine fraction={cross / led.messages:.3f} (1-1/k={1 - 1 / k:.3f})  max load={part.loads().max()}")
