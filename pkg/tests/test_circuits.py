import json

import numpy as np
import pytest

from noisymagic.circuits import NoisyCircuit, choi_mixture, random_circuit
from noisymagic.channels import depolarizing1, depolarizing2, pauli_noise
from noisymagic.rom import rom, full_basis
from noisymagic.gadgets import teleport_diagonal_gate


def test_json_roundtrip():
    c = random_circuit(np.random.default_rng(3), 3, 2, 0.1)
    back = NoisyCircuit.from_json(json.dumps(c.to_dict()))
    assert back == c


def test_t_count():
    c = NoisyCircuit.from_dict({"n": 1, "ops": [["T", 0], ["H", 0], ["U", 0, 0.3], ["TDG", 0]], "observable": "X"})
    assert c.t_count == 3


@pytest.mark.parametrize(
    "data",
    [
        {"n": 1, "ops": [["T", 1]], "observable": "Z"},
        {"n": 1, "ops": [], "observable": "ZZ"},
        {"n": 1, "ops": [["depo1", 0, 1.5]], "observable": "Z"},
        {"n": 1, "ops": [["FOO", 0]], "observable": "Z"},
        {"n": 1, "init": "q", "ops": [], "observable": "Z"},
    ],
)
def test_invalid_circuits(data):
    with pytest.raises((ValueError, KeyError)):
        NoisyCircuit.from_dict(data)


@pytest.mark.parametrize("ch", [depolarizing1(0.3), pauli_noise(0.2, 0.0, 0.4), depolarizing2(0.2)])
def test_choi_mixture_is_a_probability_mixture(ch):
    m = choi_mixture(ch)
    assert np.all(m.coefficients >= 0) and m.coefficients.sum() == pytest.approx(1)


def test_heisenberg_and_dense_agree_without_sampling():
    c = random_circuit(np.random.default_rng(8), 2, 2, 0.1)
    rho = c.exact_state()
    assert np.trace(rho.rho).real == pytest.approx(1)
    h = c.to_heisenberg()
    assert len(h.channels) == len(c.instructions)


def test_supplied_decomposition_is_reused():
    theta = 0.9
    c = NoisyCircuit.from_dict({"n": 1, "init": "+", "ops": [["U", 0, theta]], "observable": "Y"})
    dec = rom(teleport_diagonal_gate(theta).vector, full_basis(1))
    g = c.to_gadgetized(decompositions=[dec])
    assert g.resources[0] is dec
    assert g.exact_mean() == pytest.approx(np.sin(theta))


def test_noisy_diagonal_gate_uses_pair_gadget():
    c = NoisyCircuit.from_dict({"n": 1, "init": "+", "ops": [["T", 0], ["depo1", 0, 0.2]], "observable": "X"})
    g = c.to_gadgetized()
    assert g.t == 2 and len(g.resources) == 1
    assert g.exact_mean() == pytest.approx(c.exact_expectation())
