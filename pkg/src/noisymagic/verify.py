"""Dense-oracle self-checks, run by ``noisymagic verify``."""

from __future__ import annotations

import math
from typing import Callable, Iterator

import numpy as np

from . import dense
from .channels import (
    channel_stabilizer_norm,
    depolarizing1,
    pauli_channel_t_norm,
    pauli_channel_t_norm_closed_form,
    ptm_from_kraus,
    ptm_of_gate,
    unit_cell_norms,
    unit_cell_norms_closed_form,
)
from .circuits import NoisyCircuit, random_circuit
from .gadgets import CHOI_CORRECTION, choi_state, noise_teleport, teleport_dense
from .pauli import PauliVector, pauli_vector_of_pure_state
from .rom import full_basis, rom
from .samplers import heisenberg_estimate, hoeffding_shots
from .stabilizer import enumerate_stabilizer_states

Check = Callable[[], str]


def _random_state(rng: np.random.Generator, n: int) -> dense.DenseState:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return dense.DenseState.from_vector(v / np.linalg.norm(v))


def check_pauli_roundtrip() -> str:
    rng = np.random.default_rng(11)
    worst = 0.0
    for n in (1, 2, 3):
        s = _random_state(rng, n)
        back = PauliVector.from_density(s.rho).to_density()
        worst = max(worst, float(np.abs(back - s.rho).max()))
    assert worst < 1e-12, worst
    return f"max deviation {worst:.1e}"


def check_gadget_equivalence() -> str:
    rng = np.random.default_rng(12)
    worst = 0.0
    for n in (1, 2, 3):
        s = _random_state(rng, n)
        for theta in np.linspace(0, 2 * math.pi, 9):
            for q in range(n):
                out, prob = teleport_dense(s, theta, q)
                direct = dense.apply_unitary(s, "U", q, theta=theta)
                worst = max(worst, float(np.abs(out.rho - direct.rho).max()), abs(prob - 0.5))
    assert worst < 1e-10, worst
    return f"max deviation {worst:.1e}"


def check_choi_consistency() -> str:
    worst = 0.0
    for u in ("T", ("U", 0.3)):
        for p in (0.0, 0.1, 0.3):
            noise = depolarizing1(p)
            res, diag = noise_teleport(u, noise)
            noisy = diag.apply(res.vector).to_density()
            h_form = choi_state(u, noise, post="H")
            corrected = choi_state(u, noise)
            for q, g in enumerate(CHOI_CORRECTION):
                if g != "I":
                    corrected = dense.apply_unitary(corrected, g, q)
            worst = max(
                worst,
                float(np.abs(noisy - h_form.rho).max()),
                float(np.abs(noisy - corrected.rho).max()),
            )
    assert worst < 1e-10, worst
    return f"max deviation {worst:.1e}"


def check_stabilizer_states() -> str:
    for n in (1, 2):
        for t in enumerate_stabilizer_states(n):
            rho = t.to_density()
            assert np.allclose(rho, rho.conj().T)
            assert np.allclose(rho @ rho, rho, atol=1e-12)
    return "n=1,2 states are pure projectors"


def check_ptms() -> str:
    for gate in ("H", "S", "CNOT", "T"):
        u = dense.gate_matrix(gate)
        n = int(round(math.log2(u.shape[0])))
        assert np.allclose(ptm_of_gate(gate).matrix, ptm_from_kraus([u], n), atol=1e-14)
    assert channel_stabilizer_norm(ptm_of_gate("T")) == math.sqrt(2)
    return "gate PTMs agree; D(T) = sqrt(2)"


def check_unit_cell_norms() -> str:
    worst = 0.0
    for p in np.linspace(0, 1, 21):
        a = unit_cell_norms(p, p)
        b = unit_cell_norms_closed_form(p, p)
        worst = max(worst, abs(a[0] - b[0]), abs(a[1] - b[1]))
        worst = max(
            worst, abs(pauli_channel_t_norm(p, p / 2, p / 3) - pauli_channel_t_norm_closed_form(p, p / 2, p / 3))
        )
    assert worst < 1e-12, worst
    return f"max deviation {worst:.1e}"


def check_rom_small() -> str:
    t = pauli_vector_of_pure_state(np.array([1, np.exp(1j * math.pi / 4)]) / math.sqrt(2))
    d1 = rom(t, full_basis(1)).l1
    d2 = rom(t.tensor(t), full_basis(2)).l1
    assert abs(d1 - 1.414214) < 1e-5 and abs(d2 - 1.747547) < 1e-5, (d1, d2)
    return f"R(T)={d1:.6f}, R(T x T)={d2:.6f}"


def check_hoeffding() -> str:
    assert hoeffding_shots(1, 0.01, 0.05) == 73778
    assert hoeffding_shots(math.sqrt(2), 0.01, 0.05) == 147556
    return "73778 / 147556"


def check_gadgetized_circuits() -> str:
    rng = np.random.default_rng(13)
    worst, count = 0.0, 0
    while count < 6:
        c = random_circuit(rng, 1 + count % 2, 1 + count % 2, (0.0, 0.1, 0.3)[count % 3], depth=3)
        g = c.to_gadgetized()
        try:
            mean = g.exact_mean(20_000)
        except ValueError:
            continue
        worst = max(worst, abs(mean - c.exact_expectation()))
        count += 1
    assert worst < 1e-9, worst
    return f"{count} circuits, max deviation {worst:.1e}"


def check_heisenberg_clifford() -> str:
    c = NoisyCircuit.from_dict({"n": 2, "init": "+0", "ops": [["CNOT", 0, 1], ["S", 1]], "observable": "XY"})
    r = heisenberg_estimate(c.to_heisenberg(), shots=8, seed=1)
    assert abs(r.mean - c.exact_expectation()) < 1e-12 and r.sample_variance == 0.0
    return f"<XY> = {r.mean:+.0f} with zero variance"


CHECKS: dict[str, Check] = {
    "pauli-roundtrip": check_pauli_roundtrip,
    "gadget-equivalence": check_gadget_equivalence,
    "choi-consistency": check_choi_consistency,
    "stabilizer-states": check_stabilizer_states,
    "gate-ptms": check_ptms,
    "unit-cell-norms": check_unit_cell_norms,
    "rom-small": check_rom_small,
    "hoeffding": check_hoeffding,
    "gadgetized-circuits": check_gadgetized_circuits,
    "heisenberg-clifford": check_heisenberg_clifford,
}


def run_checks() -> Iterator[tuple[str, bool, str]]:
    for name, fn in CHECKS.items():
        try:
            yield name, True, fn()
        except Exception as exc:  # report, do not abort the suite
            yield name, False, f"{type(exc).__name__}: {exc}"
