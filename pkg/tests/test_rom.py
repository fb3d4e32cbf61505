import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisymagic.gadgets import teleport_diagonal_gate
from noisymagic.pauli import PauliVector
from noisymagic.rom import (
    DecompositionCache,
    InfeasibleError,
    QuasiDecomposition,
    basis_from_tag,
    full_basis,
    reduced_basis,
    reduced_basis_count,
    rom,
    rom_dephased_rotation,
    submultiplicative_bound,
)
from noisymagic.stabilizer import enumerate_stabilizer_states

T = teleport_diagonal_gate(math.pi / 4)


def t_copies(k):
    return T.copies(k).vector


@pytest.mark.parametrize("k,expected", [(1, 1.414214), (2, 1.747547), (3, 2.218951)])
def test_full_basis_table(k, expected):
    assert rom(t_copies(k), full_basis(k)).l1 == pytest.approx(expected, abs=1e-5)


@pytest.mark.parametrize("k,expected", [(1, 1.414214), (2, 1.747547), (3, 2.218951), (4, 2.862742)])
def test_reduced_basis_table(k, expected):
    assert rom(t_copies(k), reduced_basis(range(k), k)).l1 == pytest.approx(expected, abs=1e-5)


@pytest.mark.parametrize("n,count", [(1, 4), (2, 20), (3, 112), (4, 688)])
def test_reduced_counts(n, count):
    assert reduced_basis_count(n) == count
    assert len(reduced_basis(range(n), n)) == count


def test_reduced_basis_columns_are_stabilizer_states():
    full_keys = {tuple(np.round(t.pauli_vector().coeffs, 9)) for t in enumerate_stabilizer_states(2)}
    b = reduced_basis([0, 1], 2)
    for j in range(len(b)):
        assert tuple(np.round(b.column(j).coeffs, 9)) in full_keys
        assert b.tableau(j).pauli_vector().allclose(b.column(j))


def test_plain_qubits_only_take_x_eigenstates():
    b = reduced_basis([0], 2)
    assert len(b) == 4 * 2


def test_stabilizer_states_have_unit_rom():
    for t in enumerate_stabilizer_states(2)[::7]:
        assert rom(t.pauli_vector(), full_basis(2)).l1 == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 0.5))
def test_dephased_rotation_closed_form(theta, p):
    s = 1 - 2 * p
    expected = max(1.0, s * (abs(math.cos(theta)) + abs(math.sin(theta))))
    assert rom_dephased_rotation(theta, p) == pytest.approx(expected, abs=1e-7)


def test_decomposition_reconstructs_and_roundtrips(tmp_path):
    dec = rom(t_copies(2), full_basis(2))
    assert dec.reconstruct().allclose(t_copies(2), atol=1e-9)
    back = QuasiDecomposition.from_json(dec.to_json())
    assert back.l1 == dec.l1 and np.array_equal(back.indices, dec.indices)
    assert dec.dual_objective == pytest.approx(dec.l1, abs=1e-6)


def test_symmetrized_solution_matches_plain():
    v = t_copies(3)
    b = reduced_basis(range(3), 3)
    a, s = rom(v, b, symmetrize=False), rom(v, b, symmetrize=True)
    assert a.l1 == pytest.approx(s.l1, abs=1e-8)
    assert s.reconstruct().allclose(v, atol=1e-8)


def test_infeasible_target():
    with pytest.raises(InfeasibleError):
        rom(t_copies(1), reduced_basis([], 1))


def test_target_validation():
    with pytest.raises(ValueError):
        rom(PauliVector(1, [0.5, 0, 0, 0]), full_basis(1))
    with pytest.raises(ValueError):
        rom(t_copies(1), full_basis(2))


def test_cache_hit(tmp_path):
    cache = DecompositionCache(tmp_path)
    first = cache.rom(t_copies(2), full_basis(2))
    assert len(list(tmp_path.glob("*.json"))) == 1
    second = cache.rom(t_copies(2), full_basis(2))
    assert second.l1 == first.l1


def test_cache_env(monkeypatch, tmp_path):
    monkeypatch.setenv("NOISYMAGIC_CACHE_DIR", str(tmp_path))
    assert DecompositionCache().directory == tmp_path


@pytest.mark.parametrize("tag", ["full-n2", "reduced-n3-t0.2", "reduced-n2-t"])
def test_basis_tags(tag):
    assert basis_from_tag(tag).tag == tag


def test_bad_tag():
    with pytest.raises(ValueError):
        basis_from_tag("partial-n2")


def test_submultiplicativity():
    r1 = rom(t_copies(1), full_basis(1)).l1
    r2 = rom(t_copies(2), full_basis(2)).l1
    assert r2 <= submultiplicative_bound([(r1, 2)]) + 1e-9
