import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisymagic.pauli import (
    PauliString,
    PauliVector,
    commutes,
    pauli_mul,
    pauli_vector_of_pauli,
    pauli_vector_of_pure_state,
    stabilizer_norm,
)

from conftest import random_density

labels = st.integers(1, 4).flatmap(lambda n: st.text("IXYZ", min_size=n, max_size=n))


@given(labels, st.sampled_from(["", "-", "+i", "-i"]))
def test_string_roundtrip(letters, prefix):
    p = PauliString.from_str(prefix + letters)
    assert PauliString.from_str(str(p)) == p
    assert PauliString.from_index(p.n, p.index, p.phase_exp) == p


@given(labels, labels)
def test_multiplication_matches_matrices(a, b):
    if len(a) != len(b):
        return
    p, q = PauliString.from_str(a), PauliString.from_str(b)
    assert np.allclose(pauli_mul(p, q).to_matrix(), p.to_matrix() @ q.to_matrix())
    assert commutes(p, q) == np.allclose(p.to_matrix() @ q.to_matrix(), q.to_matrix() @ p.to_matrix())


def test_index_convention():
    # digit of qubit q sits at 4**q, I=0 X=1 Y=2 Z=3
    assert PauliString.from_str("XI").index == 1
    assert PauliString.from_str("IX").index == 4
    assert PauliString.from_str("YZ").index == 2 + 3 * 4


def test_qubit_zero_is_most_significant_kron_factor():
    m = PauliString.from_str("XI").to_matrix()
    assert np.allclose(m, np.kron([[0, 1], [1, 0]], np.eye(2)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_density_roundtrip(rng, n):
    rho = random_density(rng, n)
    v = PauliVector.from_density(rho)
    assert np.allclose(v.to_density(), rho)
    assert v.coeffs[0] == pytest.approx(1.0)


def test_tensor_places_self_on_low_qubits():
    z = pauli_vector_of_pure_state([1, 0])
    plus = pauli_vector_of_pure_state(np.array([1, 1]) / np.sqrt(2))
    v = z.tensor(plus)
    assert v["ZI"] == pytest.approx(1) and v["IX"] == pytest.approx(1)
    assert v["XI"] == pytest.approx(0)


@settings(max_examples=30)
@given(labels)
def test_stabilizer_norm_of_pauli_is_one(letters):
    assert stabilizer_norm(pauli_vector_of_pauli(PauliString.from_str(letters))) == pytest.approx(1)


def test_digest_ignores_tiny_noise():
    v = PauliVector(1, [1, 0.5, 0, 0])
    w = PauliVector(1, [1, 0.5 + 1e-14, -1e-15, 0])
    assert v.digest() == w.digest()


@pytest.mark.parametrize("bad", ["XQ", "*X"])
def test_bad_strings_raise(bad):
    with pytest.raises(ValueError):
        PauliString.from_str(bad)


def test_all_two_qubit_paulis_distinct_indices():
    idx = {PauliString.from_str("".join(t)).index for t in itertools.product("IXYZ", repeat=2)}
    assert idx == set(range(16))
