import numpy as np
import pytest

from noisymagic import dense
from noisymagic.channels import depolarizing1

from conftest import random_pure


def test_gate_matrices_are_unitary():
    for name, u in dense.GATES.items():
        assert np.allclose(u @ u.conj().T, np.eye(u.shape[0])), name


def test_sqrt_gates_square_to_paulis():
    for root, pauli in (("SQRT_X", "X"), ("SQRT_Y", "Y")):
        u = dense.gate_matrix(root)
        p = dense.gate_matrix(pauli)
        phase = (u @ u)[np.unravel_index(np.abs(p).argmax(), p.shape)] / p.flat[np.abs(p).argmax()]
        assert np.allclose(u @ u, phase * p)


def test_unknown_gate():
    with pytest.raises(ValueError):
        dense.gate_matrix("FOO")
    with pytest.raises(ValueError):
        dense.gate_matrix("U")


def test_cnot_direction(rng):
    s = dense.DenseState.from_vector(np.array([0, 0, 1, 0]))  # |10>
    out = dense.apply_unitary(s, "CNOT", (0, 1))
    assert np.isclose(out.rho[3, 3], 1)


def test_postselect_probability_and_normalization(rng):
    s = random_pure(rng, 2)
    out, p = dense.postselect_zero(s, 1)
    amp = np.diag(s.rho).real
    assert p == pytest.approx(amp[0] + amp[2])
    assert np.trace(out.rho).real == pytest.approx(1)


def test_full_depolarizing_gives_maximally_mixed(rng):
    s = random_pure(rng, 1)
    out = dense.apply_channel(s, depolarizing1(1.0), 0)
    assert np.allclose(out.rho, np.eye(2) / 2)


def test_partial_trace_of_product(rng):
    a, b = random_pure(rng, 1), random_pure(rng, 1)
    joint = dense.DenseState(2, np.kron(a.rho, b.rho))
    assert np.allclose(dense.partial_trace(joint, [1]).rho, b.rho)
