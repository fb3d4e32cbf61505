"""Estimate an expectation value with both samplers.

The circuit in data/t_chain.json has two noisy T gates.  Stabilizer
sampling replaces them with noisy resource states; Heisenberg sampling
walks the observable backwards through the circuit's transfer matrices.
Both are unbiased, and the Hoeffding bound fixes the shot count from the
product of the negativities.
"""

from pathlib import Path

from noisymagic import NoisyCircuit, heisenberg_estimate, stabilizer_sampling_estimate

circuit = NoisyCircuit.from_json((Path(__file__).parent / "data" / "t_chain.json").read_text())
exact = circuit.exact_expectation()
print(f"exact <{circuit.observable.letters}> = {exact:+.4f}")

for delta in (0.1, 0.05):
    s = stabilizer_sampling_estimate(circuit.to_gadgetized(), seed=1, delta=delta)
    h = heisenberg_estimate(circuit.to_heisenberg(), seed=1, delta=delta)
    for r in (s, h):
        print(
            f"delta={delta:<5} {r.method:<11} l1={r.l1_total:.4f} shots={r.shots:>6} "
            f"mean={r.mean:+.4f} error={r.mean - exact:+.4f}"
        )
