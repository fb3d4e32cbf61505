"""How expensive are copies of the T state to sample?

We solve the robustness LP for one to five copies of |T>.  Up to four
copies the full stabilizer basis is affordable; the reduced basis keeps
only X/Y-type states and stays small enough for five copies, at the price
of a slightly loose upper bound there.
"""

import math
import time

from noisymagic import full_basis, reduced_basis, rom, teleport_diagonal_gate

t_state = teleport_diagonal_gate(math.pi / 4)

print(f"{'copies':>6} {'full':>10} {'reduced':>10} {'columns':>9} {'sec':>6}")
for k in range(1, 6):
    target = t_state.copies(k).vector
    full = f"{rom(target, full_basis(k)).l1:.6f}" if k <= 4 else "-"
    start = time.perf_counter()
    basis = reduced_basis(range(k), k)
    value = rom(target, basis).l1
    print(f"{k:>6} {full:>10} {value:>10.6f} {len(basis):>9} {time.perf_counter() - start:>6.2f}")

# Sampling cost per T gate: sqrt(2)^2 = 2 from a single copy, less when
# copies are decomposed jointly.
for k in (1, 2, 4):
    r = rom(t_state.copies(k).vector, reduced_basis(range(k), k)).l1
    print(f"per-T cost factor using {k}-copy blocks: {r ** (2 / k):.4f}")
