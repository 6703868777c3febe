import numpy as np
import pytest

from cqpolar.bounds import (ReliabilityBounds, ReliabilityInterval, hybrid_bounds,
                            propagate_all, propagate_from_seed, propagate_minus,
                            propagate_plus, write_bounds_csv)
from cqpolar.budget import Budget
from cqpolar.channel import BinaryCQChannel, make_pure_overlap, root_channel_fidelity
from cqpolar.synthesis import split_root_fidelities

import oracles


def test_interval_validation():
    iv = ReliabilityInterval(0.2, 0.4)
    assert iv.width == pytest.approx(0.2)
    with pytest.raises(ValueError):
        ReliabilityInterval(0.5, 0.4)
    with pytest.raises(ValueError):
        ReliabilityInterval(-0.1, 0.4)


def test_single_step_examples():
    assert propagate_minus(ReliabilityInterval(0.0, 0.0)) == ReliabilityInterval(0.0, 0.0)
    assert propagate_minus(ReliabilityInterval(1.0, 1.0)) == ReliabilityInterval(1.0, 1.0)
    got = propagate_minus(ReliabilityInterval(0.5, 0.5))
    assert (got.f_lo, got.f_hi) == (0.5, 0.75)
    assert propagate_plus(ReliabilityInterval(0.5, 0.5)) == ReliabilityInterval(0.25, 0.25)
    assert propagate_plus(ReliabilityInterval(0.0, 0.0)) == ReliabilityInterval(0.0, 0.0)
    assert propagate_plus(ReliabilityInterval(1.0, 1.0)) == ReliabilityInterval(1.0, 1.0)


def test_propagate_all_level_one():
    table = propagate_all(0.5, 1)
    assert table[1] == ReliabilityInterval(0.5, 0.75)
    assert table[2] == ReliabilityInterval(0.25, 0.25)


def test_propagate_all_plus_chain_is_tight():
    table = propagate_all(0.5, 3)
    iv = table[8]
    assert iv.f_lo == iv.f_hi == pytest.approx(0.00390625)


def test_propagate_all_zero_base():
    table = propagate_all(0.0, 4)
    assert np.all(table.f_lo == 0.0) and np.all(table.f_hi == 0.0)


def test_propagate_all_validation():
    with pytest.raises(ValueError):
        propagate_all(1.5, 2)
    with pytest.raises(ValueError):
        propagate_all(0.5, 30)


def test_upper_bound_follows_index_order_of_synthesis():
    table = propagate_all(0.5, 3)
    np.testing.assert_allclose(table.f_hi, oracles.z_recursion(0.5, 3), atol=1e-15)


def test_soundness_against_exact_synthesis():
    rng = np.random.default_rng(0)
    channels = [BinaryCQChannel.bec(0.5), BinaryCQChannel.bsc(0.11),
                make_pure_overlap(0.5),
                BinaryCQChannel.from_states(oracles.random_density(rng),
                                            oracles.random_density(rng)),
                BinaryCQChannel.from_states(oracles.random_density(rng, real=True),
                                            oracles.random_density(rng, real=True))]
    for w in channels:
        for n in (1, 2, 3):
            exact = np.array(split_root_fidelities(w, n))
            table = propagate_all(root_channel_fidelity(w), n)
            assert np.all(table.f_lo - 1e-9 <= exact)
            assert np.all(exact <= table.f_hi + 1e-9)


def test_super_martingale_step_on_propagated_values():
    table = propagate_all(0.37, 8)
    parent = propagate_all(0.37, 7)
    halves = 0.5 * table.f_hi[0::2] + 0.5 * table.f_hi[1::2]
    assert np.all(halves <= parent.f_hi + 1e-12)


def test_good_fraction_cap_and_trend():
    for f0, rate in ((0.5, 0.5), (2 * np.sqrt(0.11 * 0.89), 1 - 0.4999)):
        fractions = []
        for n in range(4, 21):
            table = propagate_all(f0, n)
            fractions.append(float(np.mean(table.f_hi <= 0.01)))
        assert all(a <= b + 1e-12 for a, b in zip(fractions, fractions[1:]))
        cap = rate / np.log2(2 / 1.01) + 0.02
        assert fractions[-1] <= cap


def test_seeded_propagation_tightens():
    w = BinaryCQChannel.bec(0.5)
    pure = propagate_all(root_channel_fidelity(w), 6)
    seeded = hybrid_bounds(w, 6)
    assert np.all(seeded.f_hi <= pure.f_hi + 1e-12)
    assert np.all(seeded.f_lo >= pure.f_lo - 1e-12)
    exact6 = np.array(split_root_fidelities(w, 3))
    resumed = propagate_from_seed(exact6, 3)
    np.testing.assert_allclose(resumed.f_hi, exact6, atol=1e-15)


def test_hybrid_falls_back_under_budget():
    w = make_pure_overlap(0.5)
    tight = Budget(max_quantum_dim=4, max_branches=2, max_dense_dim=4)
    table = hybrid_bounds(w, 5, budget=tight)
    assert isinstance(table, ReliabilityBounds) and len(table) == 32
    pure = propagate_all(root_channel_fidelity(w), 5)
    np.testing.assert_allclose(table.f_hi, pure.f_hi)


def test_csv_export(tmp_path):
    path = tmp_path / "bounds.csv"
    table = propagate_all(0.5, 2)
    write_bounds_csv(str(path), table)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# schema=")
    assert lines[1] == "index,f_lo,f_hi,holevo_lo,holevo_hi"
    assert len(lines) == 2 + 4
    index, f_lo, f_hi, h_lo, h_hi = lines[2].split(",")
    assert index == "1"
    assert float(h_lo) == pytest.approx(np.log2(2 / (1 + float(f_hi))))
    assert float(h_hi) == pytest.approx(np.sqrt(1 - float(f_lo) ** 2))
