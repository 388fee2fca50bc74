"""Charge CONGEST rounds and messages for a detection and show how they scale with n."""

from cdrw import CdrwConfig, generate_gnp, simulate_cdrw

for e in (9, 10, 11, 12):
    n = 2**e
    g = generate_gnp(n, 2 * e / n, seed=1)
    run = simulate_cdrw(g, 0, CdrwConfig(delta=0.05, seed=1))
    led = run.ledger
    phases = ", ".join(f"{k}={r}" for k, (r, _) in led.per_phase.items())
    print(f"n=2^{e}: rounds={led.rounds} ({phases}) messages={led.messages} "
          f"rounds/log^4 n={led.rounds / e**4:.2f} tree height={run.tree.height}")
print("per-phase JSON for the last run:")
print(led.to_json(r=1, p=2 * 12 / 4096, q=0.0, seed=1))
