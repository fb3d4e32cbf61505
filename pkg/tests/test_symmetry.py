import math

import numpy as np
import pytest

from noisymagic.gadgets import teleport_diagonal_gate, unit_cell_resource
from noisymagic.rom import full_basis, reduced_basis
from noisymagic.symmetry import candidate_symmetries, local_xy_swap, qubit_swap, reduce_problem


def test_swap_is_an_involution():
    g = qubit_swap(3, 0, 2)
    v = np.arange(64.0)
    assert np.array_equal(g.apply(g.apply(v)), v)


def test_xy_swap_signs():
    g = local_xy_swap(1, 0)
    assert np.array_equal(g.apply(np.array([1.0, 2.0, 3.0, 4.0])), [1.0, 3.0, 2.0, -4.0])


def test_candidates_respect_t_classes():
    names = {g.name for g in candidate_symmetries(3, [0, 1])}
    assert names == {"xy0", "xy1", "swap01"}


def test_t_state_orbits():
    v = teleport_diagonal_gate(math.pi / 4).copies(3).vector
    b = reduced_basis(range(3), 3)
    red = reduce_problem(b.matrix, np.asarray(v.coeffs), 3, range(3))
    assert red is not None
    assert red.a.shape[1] < len(b) and red.weight.sum() == len(b)
    # expanded solutions are constant on orbits
    y = np.arange(red.a.shape[1], dtype=float)
    x = red.expand(y)
    for orb in range(red.a.shape[1]):
        assert np.all(x[red.column_orbit == orb] == orb)


def test_asymmetric_target_has_no_xy_symmetry():
    v = teleport_diagonal_gate(0.3).vector
    b = full_basis(1)
    red = reduce_problem(b.matrix, np.asarray(v.coeffs), 1)
    assert red is None


@pytest.mark.parametrize("kind", [2, 3])
def test_unit_cell_generators_are_symmetries(kind):
    r = unit_cell_resource(kind, 0.05)
    b = full_basis(4)
    c = np.asarray(r.vector.coeffs)
    red = reduce_problem(b.matrix, c, 4)
    for name in red.generators:
        g = next(s for s in candidate_symmetries(4) if s.name == name)
        assert np.allclose(g.apply(c), c)
