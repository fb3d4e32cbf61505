import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisymagic import dense
from noisymagic.channels import dephasing, depolarizing1, pauli_error, pauli_noise
from noisymagic.gadgets import (
    CHOI_CORRECTION,
    DiagonalNoise,
    StochasticUnitaryChannel,
    choi_state,
    find_choi_correction,
    fused_t_resource,
    gadget_pair_resource,
    noise_fuse,
    noise_teleport,
    push_dephasing,
    teleport_dense,
    teleport_diagonal_gate,
    unit_cell_resource,
)
from noisymagic.rom import full_basis, rom

from conftest import random_pure


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 2 * math.pi), st.integers(0, 2), st.integers(0, 2**31))
def test_teleportation_equals_direct_rotation(theta, qubit, seed):
    s = random_pure(np.random.default_rng(seed), 3)
    out, prob = teleport_dense(s, theta, qubit)
    direct = dense.apply_unitary(s, "U", qubit, theta=theta)
    assert prob == pytest.approx(0.5)
    assert np.allclose(out.rho, direct.rho, atol=1e-10)


@pytest.mark.parametrize(
    "letter,label", [("X", "IZ"), ("Y", "ZZ"), ("Z", "ZI")]
)
def test_teleported_labels(letter, label):
    _, diag = noise_teleport("T", pauli_error(letter, 0.2))
    assert diag.weights() == pytest.approx({"II": 0.8, label: 0.2})


@pytest.mark.parametrize("u", ["T", ("U", 0.3), ("U", 2.1)])
@pytest.mark.parametrize("noise", [depolarizing1(0.0), depolarizing1(0.1), depolarizing1(0.3), pauli_noise(0.1, 0.3, 0.2)])
def test_choi_consistency(u, noise):
    res, diag = noise_teleport(u, noise)
    noisy = diag.apply(res.vector).to_density()
    corrected = choi_state(u, noise)
    for q, g in enumerate(CHOI_CORRECTION):
        if g != "I":
            corrected = dense.apply_unitary(corrected, g, q)
    assert np.allclose(noisy, corrected.rho, atol=1e-10)
    assert np.allclose(noisy, choi_state(u, noise, post="H").rho, atol=1e-10)


def test_frozen_correction_is_first_search_hit():
    assert find_choi_correction()[0] == CHOI_CORRECTION


def test_noiseless_pair_resource_rom():
    assert rom(gadget_pair_resource("T").vector, full_basis(2)).l1 == pytest.approx(math.sqrt(2), abs=1e-7)


def test_diagonal_noise_compose_and_ptm():
    a = DiagonalNoise(2, ((0.9, "II"), (0.1, "ZI")))
    b = DiagonalNoise(2, ((0.8, "II"), (0.2, "ZI")))
    c = a.compose(b)
    assert c.weights()["ZI"] == pytest.approx(0.1 * 0.8 + 0.9 * 0.2)
    v = gadget_pair_resource("T").vector
    assert c.apply(v).allclose(a.apply(b.apply(v)))


def test_diagonal_noise_rejects_x():
    with pytest.raises(ValueError):
        DiagonalNoise(1, ((1.0, "X"),))


def test_fuse_through_hadamard_swaps_x_and_z():
    fused = noise_fuse(pauli_error("X", 0.2), "H")
    assert {e.letters: p for p, e in fused.terms} == pytest.approx({"I": 0.8, "Z": 0.2})


def test_fuse_dephasing_through_t_is_unchanged():
    ch = dephasing(0.2)
    assert noise_fuse(ch, "T") is ch


def test_fuse_x_through_t_is_stochastic_clifford():
    fused = noise_fuse(pauli_error("X", 0.2), "T")
    assert isinstance(fused, StochasticUnitaryChannel) and fused.is_clifford
    # E o [T] == [T] o E'
    rho = random_pure(np.random.default_rng(0), 1)
    t = dense.gate_matrix("T")
    lhs = dense.apply_kraus(dense.apply_unitary(rho, "T", 0), pauli_error("X", 0.2).kraus(), 0)
    rhs = dense.apply_unitary(dense.apply_kraus(rho, fused.kraus(), 0), t, 0)
    assert np.allclose(lhs.rho, rhs.rho)


def test_fuse_rejects_non_clifford_non_diagonal():
    with pytest.raises(ValueError):
        noise_fuse(pauli_error("X", 0.1), dense.gate_matrix("H") @ dense.gate_matrix("T"))


@pytest.mark.parametrize("p", [0.0, 0.1, 0.3])
def test_push_dephasing_matches_noisy_teleport(p):
    theta = 0.7
    s = random_pure(np.random.default_rng(5), 1)
    anc = push_dephasing(theta, p)
    out, _ = dense.postselect_zero(
        dense.apply_unitary(s.tensor(dense.DenseState(1, anc.density())), "CNOT", (0, 1)), 1
    )
    out = dense.partial_trace(out, [0])
    ref = dense.apply_kraus(dense.apply_unitary(s, "U", 0, theta=theta), dephasing(p).kraus(), 0)
    assert np.allclose(out.rho, ref.rho)


def test_resource_states_are_physical():
    for r in (teleport_diagonal_gate(0.4), fused_t_resource(0.2), unit_cell_resource(2, 0.1), unit_cell_resource(3, 0.3)):
        r.check()


def test_unit_cell_three_noiseless_equals_two_t_copies():
    r = unit_cell_resource(3, 0.0)
    assert r.rom("full").l1 == pytest.approx(1.747547, abs=1e-6)
    assert r.t_qubits == (0, 2)


def test_fused_resource_monotone():
    vals = [fused_t_resource(p, 1, "error").rom("full").l1 for p in (0.0, 0.1, 0.2, 0.3)]
    assert all(a >= b - 1e-9 for a, b in zip(vals, vals[1:]))


def test_bad_kinds():
    with pytest.raises(ValueError):
        unit_cell_resource(4, 0.1)
    with pytest.raises(ValueError):
        fused_t_resource(0.1, fold=3)
    with pytest.raises(ValueError):
        noise_teleport("H", depolarizing1(0.1))
