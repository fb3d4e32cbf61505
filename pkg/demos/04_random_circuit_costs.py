"""Which simulator wins on noisy random circuits?

Each random circuit is a grid of unit cells: two single-qubit gates and a
CZ, all followed by depolarizing noise.  The cost of each method is a
product of per-cell factors, so the scaling exponent alpha (cost = 2^(alpha t))
only depends on the noise rate.  The sweep takes about a minute.
"""

from noisymagic.rqc import RqcSpec, alpha_crossing, grid, heisenberg_cost, sample_budget, scaling_sweep, stabilizer_cost

print(f"{'p':>5} {'stab':>7} {'opt':>7} {'heis':>7}")
for row in scaling_sweep(grid(0.0, 0.15, 0.03)):
    print(f"{row['p']:>5.2f} {row['alpha_stab']:>7.4f} {row['alpha_opt']:>7.4f} {row['alpha_heis']:>7.4f}")

for method in ("heisenberg", "optimized_stabilizer"):
    print(f"{method}: alpha drops below 0.468 at p = {alpha_crossing(method)}")

spec = RqcSpec(m=6, n=6, d=12, p1=0.05)
for report in (stabilizer_cost(spec, optimized=True), heisenberg_cost(spec)):
    budget = sample_budget(40, report.alpha, 1e-3, 1e-2)
    print(f"{report.method}: t=40 needs {float(budget):.2e} samples (delta 1e-3, eps 1e-2)")
