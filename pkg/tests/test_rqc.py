import math

import pytest

from noisymagic.rqc import (
    RqcSpec,
    alpha_crossing,
    alpha_per_t,
    crossover,
    empirical_unit_cell_counts,
    grid,
    heisenberg_cost,
    heisenberg_factors,
    layout,
    sample_budget,
    stabilizer_cost,
    stabilizer_factors,
    to_noisy_circuit,
    unit_cell_count_total,
    unit_cell_counts,
)


def test_layout_pairs_are_disjoint_neighbours():
    spec = RqcSpec(3, 4, 8)
    for pairs in layout(spec):
        used = [q for p in pairs for q in p]
        assert len(used) == len(set(used))
        for a, b in pairs:
            ra, ca = divmod(a, 4)
            rb, cb = divmod(b, 4)
            assert abs(ra - rb) + abs(ca - cb) == 1


def test_one_dimensional_lattice():
    spec = RqcSpec(1, 5, 4)
    assert all(layout(spec))


def test_expected_counts():
    spec = RqcSpec(6, 6, 12)
    assert unit_cell_count_total(spec) == 180
    assert unit_cell_counts(spec) == pytest.approx((80, 80, 20))
    assert sum(empirical_unit_cell_counts(spec)) == 180


def test_generated_circuit_is_seeded():
    a = to_noisy_circuit(RqcSpec(2, 2, 3, 0.1, seed=4))
    b = to_noisy_circuit(RqcSpec(2, 2, 3, 0.1, seed=4))
    assert a == b
    assert a.t_count == sum(1 for i in a.instructions if i.name == "T")


def test_heisenberg_alpha_noiseless_is_one():
    assert alpha_per_t(heisenberg_factors(0, 0)) == 1.0
    assert heisenberg_cost(RqcSpec(6, 6, 12)).alpha == pytest.approx(1.0)


def test_factors_never_below_one():
    for p in (0.2, 0.5, 1.0):
        assert min(heisenberg_factors(p, p)) == 1.0


def test_stabilizer_alpha_noiseless():
    stab = stabilizer_factors(0.0, 0.0)
    assert stab[0] == pytest.approx(math.sqrt(2), abs=1e-6)
    assert stab[1] == pytest.approx(1.747547, abs=1e-6)
    report = stabilizer_cost(RqcSpec(6, 6, 12))
    assert report.alpha == pytest.approx(alpha_per_t(stab))


def test_optimized_beats_plain_at_noise():
    plain = stabilizer_factors(0.05, 0.05)
    opt = stabilizer_factors(0.05, 0.05, optimized=True)
    assert opt[0] < plain[0] and opt[1] < plain[1]


def test_crossover_same_method_is_none():
    assert crossover("unit2", [0.0, 0.1], "heisenberg", "heisenberg") is None


def test_alpha_crossing_heisenberg():
    assert alpha_crossing("heisenberg") == pytest.approx(0.10)


def test_grid_inclusive_and_rounded():
    g = grid(0, 0.2, 0.01)
    assert len(g) == 21 and g[-1] == 0.2 and g[3] == 0.03


def test_sample_budget_scale():
    b = sample_budget(40, 1.0, 1e-3, 1e-2)
    assert float(b) == pytest.approx(2**40 * 2e6 * math.log(200), rel=1e-12)


@pytest.mark.parametrize("kwargs", [{"m": 0, "n": 3, "d": 2}, {"m": 1, "n": 1, "d": 2}, {"m": 2, "n": 2, "d": 2, "p1": 2.0}])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        RqcSpec(**kwargs)
