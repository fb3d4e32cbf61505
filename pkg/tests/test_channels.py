import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noisymagic import dense
from noisymagic.channels import (
    PTM,
    channel_from_dict,
    channel_stabilizer_norm,
    dephasing,
    depolarizing1,
    depolarizing2,
    pauli_channel_t_norm,
    pauli_channel_t_norm_closed_form,
    pauli_noise,
    ptm_from_kraus,
    ptm_of_gate,
    replacement_rate,
    unit_cell_norms,
    unit_cell_norms_closed_form,
)
from noisymagic.pauli import PauliVector

from conftest import random_density

rates = st.floats(0, 1)


@pytest.mark.parametrize("gate", ["H", "S", "SDG", "SQRT_X", "SQRT_Y", "X", "CNOT", "CZ", "SWAP"])
def test_clifford_ptms_are_signed_permutations(gate):
    r = ptm_of_gate(gate)
    assert r.is_signed_permutation and r.is_trace_preserving
    assert channel_stabilizer_norm(r) == 1.0


def test_t_norm_is_exactly_sqrt2():
    assert channel_stabilizer_norm(ptm_of_gate("T")) == math.sqrt(2)


@pytest.mark.parametrize("theta", np.linspace(0, 2 * math.pi, 7))
def test_rotation_norm(theta):
    expected = abs(math.cos(theta)) + abs(math.sin(theta))
    assert channel_stabilizer_norm(ptm_of_gate("U", theta)) == pytest.approx(expected)


@given(rates)
def test_noise_ptms_are_diagonal(p):
    for ch in (dephasing(p), depolarizing1(p), depolarizing2(p)):
        r = ch.ptm()
        assert r.is_diagonal and r.is_trace_preserving


@pytest.mark.parametrize("ch", [depolarizing1(0.3), dephasing(0.2), pauli_noise(0.1, 0.2, 0.3), depolarizing2(0.4)])
def test_ptm_matches_kraus_action(rng, ch):
    rho = random_density(rng, ch.n)
    out = sum(k @ rho @ k.conj().T for k in ch.kraus())
    via_ptm = ch.ptm().apply(PauliVector.from_density(rho)).to_density()
    assert np.allclose(out, via_ptm)
    assert np.allclose(ch.ptm().matrix, ptm_from_kraus(ch.kraus(), ch.n))


def test_depolarizing_is_replacement_form(rng):
    rho = random_density(rng, 1)
    out = dense.apply_channel(dense.DenseState(1, rho), depolarizing1(0.3), 0).rho
    assert np.allclose(out, 0.7 * rho + 0.3 * np.eye(2) / 2)


def test_error_convention_rescales():
    assert replacement_rate(0.3, 1, "error") == pytest.approx(0.4)
    assert replacement_rate(0.3, 2, "error") == pytest.approx(0.32)
    with pytest.raises(ValueError):
        replacement_rate(0.3, 1, "nope")


def test_composition_order():
    a = PTM(1, np.diag([1, 0.5, 0.5, 1.0]))
    h = ptm_of_gate("H")
    assert np.allclose((a @ h).matrix, a.matrix @ h.matrix)
    assert np.allclose(h.then(a).matrix, (a @ h).matrix)


@pytest.mark.parametrize("p", np.linspace(0, 1, 21))
def test_unit_cell_closed_forms(p):
    a, b = unit_cell_norms(p, p), unit_cell_norms_closed_form(p, p)
    assert a == pytest.approx(b, abs=1e-12)


@given(rates, rates)
def test_unit_cell_closed_forms_independent_rates(p1, p2):
    assert unit_cell_norms(p1, p2) == pytest.approx(unit_cell_norms_closed_form(p1, p2), abs=1e-12)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_pauli_t_closed_form(px, py, pz):
    if px + py + pz > 4:
        return
    assert pauli_channel_t_norm(px, py, pz) == pytest.approx(pauli_channel_t_norm_closed_form(px, py, pz), abs=1e-12)


def test_noiseless_unit_cells():
    assert unit_cell_norms(0, 0) == pytest.approx((math.sqrt(2), 2.0))


def test_dict_roundtrip():
    for ch in (depolarizing1(0.1), pauli_noise(0.1, 0.0, 0.2), depolarizing1(0.2).compose(dephasing(0.1))):
        back = channel_from_dict(ch.to_dict())
        assert np.allclose(back.ptm().matrix, ch.ptm().matrix)


@pytest.mark.parametrize("bad", [-0.1, 1.1])
def test_rate_validation(bad):
    with pytest.raises(ValueError):
        depolarizing1(bad)
    with pytest.raises(ValueError):
        unit_cell_norms(bad, 0.1)


def test_adjoint_norm_is_row_sum():
    r = ptm_of_gate("T")
    rows = np.abs(r.matrix).sum(axis=1)
    assert channel_stabilizer_norm(r) == rows.max()


def test_ptm_csv_has_labels():
    text = ptm_of_gate("H").to_csv().splitlines()
    assert text[0] == "row,I,X,Y,Z"
    assert len(text) == 5
