import itertools

import numpy as np
import pytest

import wsnfusion as w
from wsnfusion.allocation import (
    BitTable,
    beta_objective,
    branch_and_bound,
    detection_probability,
    exhaustive_grid_oracle,
    local_search,
)
from wsnfusion.quantization import bits_for_power_array, min_power_for_bits


def exact_bit_oracle(scenario, budget, p_fa, max_bits=6):
    """Minimum of beta over every affordable bit vector, evaluated at the
    cheapest powers that buy it."""
    best = np.inf
    gains, zeta = scenario.channel_gain, scenario.comm_noise_var
    for bits in itertools.product(range(max_bits + 1), repeat=scenario.m):
        powers = [min_power_for_bits(b, g, z) for b, g, z in zip(bits, gains, zeta)]
        if sum(powers) <= budget:
            best = min(best, beta_objective(powers, scenario, p_fa))
    return best


@pytest.mark.parametrize("seed", range(6))
def test_matches_exact_enumeration(seed):
    sc = w.generate_scenario(4, 10, seed=seed)
    budget = 1.0 + seed
    alloc = branch_and_bound(sc, budget, 0.1, tol=1e-9)
    assert alloc.converged
    assert alloc.beta == pytest.approx(exact_bit_oracle(sc, budget, 0.1), abs=1e-9)


@pytest.mark.parametrize("seed", range(3))
def test_bounds_sandwich_every_node(seed):
    sc = w.generate_scenario(6, 10, seed=seed)
    alloc = branch_and_bound(sc, 6.0, 0.1, check_bounds=True, check_samples=16)
    assert alloc.converged


def test_allocation_invariants():
    sc = w.generate_scenario(12, 10, seed=4)
    alloc = branch_and_bound(sc, 10.0, 0.1)
    assert np.all(alloc.powers >= 0)
    assert alloc.powers.sum() <= 10.0 + 1e-9
    np.testing.assert_array_equal(alloc.bits, bits_for_power_array(alloc.powers, sc.channel_gain, sc.comm_noise_var))
    assert alloc.beta == pytest.approx(beta_objective(alloc.powers, sc, 0.1), rel=1e-12)
    assert alloc.objective == pytest.approx(w.qfunc(alloc.beta))
    assert alloc.summary()["converged"] is True


def test_single_sensor_takes_whole_budget():
    sc = w.generate_scenario(1, 10, seed=2)
    for budget in (0.5, 3.0, 40.0):
        assert branch_and_bound(sc, budget).powers.sum() == pytest.approx(budget)


def test_permuting_sensors_permutes_allocation():
    sc = w.generate_scenario(5, 10, seed=8)
    perm = np.array([3, 0, 4, 1, 2])
    shuffled = w.generate_scenario(
        5, 10, target_avg_snr_db=None, noise_var=sc.noise_var[perm], channel_gain=sc.channel_gain[perm]
    )
    a = branch_and_bound(sc, 5.0)
    b = branch_and_bound(shuffled, 5.0)
    assert a.beta == pytest.approx(b.beta, abs=1e-12)
    np.testing.assert_array_equal(a.bits[perm], b.bits)


def test_better_channels_get_more_bits_at_equal_snr():
    sc = w.generate_scenario(10, 10, seed=1, noise_var=[0.4] * 10)
    alloc = branch_and_bound(sc, 10.0)
    order = np.argsort(sc.channel_gain)
    assert np.all(np.diff(alloc.bits[order]) >= 0)


def test_larger_budget_never_hurts():
    sc = w.generate_scenario(6, 10, seed=5)
    betas = [branch_and_bound(sc, b).beta for b in (1.0, 2.0, 4.0, 8.0, 16.0)]
    assert all(b2 <= b1 + 1e-12 for b1, b2 in zip(betas, betas[1:]))


def test_grid_oracle_never_beats_branch_and_bound():
    sc = w.generate_scenario(3, 10, seed=2)
    grid = exhaustive_grid_oracle(sc, 4.0, 0.1, grid_steps=60)
    alloc = branch_and_bound(sc, 4.0, 0.1)
    assert alloc.beta <= grid.beta + 1e-12
    assert grid.powers.sum() <= 4.0 + 1e-9
    with pytest.raises(ValueError):
        exhaustive_grid_oracle(w.generate_scenario(5, 10), 1.0)


def test_bit_table_agrees_with_pipeline():
    sc = w.generate_scenario(5, 10, seed=6)
    table = BitTable(sc, 0.1, 5.0)
    gen = np.random.default_rng(0)
    for _ in range(20):
        bits = np.minimum(gen.integers(0, 4, sc.m), table.max_bits)
        powers = [min_power_for_bits(b, g, z) for b, g, z in zip(bits, sc.channel_gain, sc.comm_noise_var)]
        assert table.beta(bits) == pytest.approx(beta_objective(powers, sc, 0.1), rel=1e-10)
        np.testing.assert_allclose(table.beta_many(bits[None, :]), [table.beta(bits)], rtol=1e-12)
        assert table.feasible(bits) == (sum(powers) <= 5.0)


def test_local_search_stays_feasible():
    sc = w.generate_scenario(8, 10, seed=9)
    table = BitTable(sc, 0.1, 6.0)
    out = local_search(table, np.zeros(sc.m, dtype=int))
    assert table.feasible(out)
    assert table.beta(out) < np.inf


def test_objective_edge_cases():
    sc = w.generate_scenario(3, 10)
    assert beta_objective([0, 0, 0], sc, 0.1) == np.inf
    assert detection_probability(np.inf, 0.1) == 0.1
    with pytest.raises(ValueError):
        beta_objective([-1, 0, 0], sc, 0.1)
    with pytest.raises(ValueError):
        branch_and_bound(sc, 0.0)


def test_node_limit_reports_gap():
    sc = w.generate_scenario(20, 10, seed=1)
    alloc = branch_and_bound(sc, 20.0, max_nodes=3)
    assert alloc.nodes <= 3
    assert alloc.converged or alloc.gap > 0


def test_allocation_csv(tmp_path):
    sc = w.generate_scenario(4, 10, seed=0)
    alloc = branch_and_bound(sc, 4.0)
    path = tmp_path / "a.csv"
    w.allocation.write_allocation_csv(alloc, sc, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "sensor,channel_gain,channel_quality,snr,power,bits,weight"
    assert len(lines) == 5
    for line, b in zip(lines[1:], alloc.bits):
        cells = line.split(",")
        assert int(cells[5]) == b
        assert (float(cells[6]) == 0) == (b == 0)
