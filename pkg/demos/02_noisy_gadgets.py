"""Noise makes magic cheaper.

A depolarized T gate is teleported with a two-qubit resource.  Its X and
Y errors turn into Z errors on that resource, so the noisy resource can
be decomposed with less negativity.  With enough noise the resource is a
mixture of stabilizer states and the gate costs nothing extra.
"""

import math

from noisymagic import dense, depolarizing1, full_basis, noise_teleport, rom
from noisymagic.gadgets import CHOI_CORRECTION, choi_state, fused_t_resource

print("noise-teleported T gate")
for p in (0.0, 0.1, 0.2, 0.3):
    res, diag = noise_teleport("T", depolarizing1(p))
    noisy = diag.apply(res.vector)
    print(f"  p={p:.1f}  induced Z noise {diag.weights()}  ROM {rom(noisy, full_basis(2)).l1:.4f}")

# the same state, seen as the (corrected) Choi state of the noisy gate
res, diag = noise_teleport("T", depolarizing1(0.2))
choi = choi_state("T", depolarizing1(0.2))
choi = dense.apply_unitary(choi, CHOI_CORRECTION[1], 1)
gap = abs(diag.apply(res.vector).to_density() - choi.rho).max()
print(f"Choi picture agrees to {gap:.1e}")

# fusing the noise of one or two neighbouring Clifford gates into |T+>
for fold in (1, 2):
    p = next(
        p / 100
        for p in range(0, 101)
        if fused_t_resource(p / 100, fold, convention="error").rom("full").l1 <= 1 + 1e-7
    )
    print(f"{fold} fused noise layer(s): T becomes free at p = {p:.2f}")

print(f"bare T gate channel norm sqrt(2) = {math.sqrt(2):.6f}")
