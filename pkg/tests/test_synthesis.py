import math

import numpy as np
import pytest

from cqpolar.budget import Budget, BudgetExceeded
from cqpolar.channel import (BinaryCQChannel, channel_fidelity, channel_params,
                             holevo_information, make_pure_overlap,
                             root_channel_fidelity)
from cqpolar.synthesis import (PureStateEnsemble, SplitChannelIndex,
                               gram_split_params, split_channel, split_params,
                               split_rates, split_root_fidelities,
                               transform_minus, transform_plus)

import oracles


def _random_channel(rng, real=False):
    return BinaryCQChannel.from_states(oracles.random_density(rng, real=real),
                                       oracles.random_density(rng, real=real))


def test_minus_of_identical_outputs_stays_useless():
    rng = np.random.default_rng(0)
    a = oracles.random_density(rng)
    w = BinaryCQChannel.from_states(a, a.copy())
    assert abs(channel_fidelity(transform_minus(w)) - 1.0) <= 1e-9


def test_minus_of_orthogonal_pure_outputs_stays_perfect():
    w = make_pure_overlap(0.0)
    assert channel_fidelity(transform_minus(w)) <= 1e-12


def test_erasure_single_step_values():
    w = BinaryCQChannel.bec(0.5)
    assert abs(root_channel_fidelity(transform_minus(w)) - 0.75) <= 1e-12
    assert abs(root_channel_fidelity(transform_plus(w)) - 0.25) <= 1e-12


def test_plus_step_squares_root_fidelity():
    rng = np.random.default_rng(1)
    for real in (False, True):
        w = _random_channel(rng, real)
        f = channel_fidelity(w)
        assert abs(math.sqrt(channel_fidelity(transform_plus(w))) - f) <= 1e-8


def test_plus_of_identical_outputs():
    rng = np.random.default_rng(2)
    a = oracles.random_density(rng)
    w = BinaryCQChannel.from_states(a, a.copy())
    assert abs(channel_fidelity(transform_plus(w)) - 1.0) <= 1e-9


def test_single_step_relations_random_suite():
    rng = np.random.default_rng(3)
    for k in range(8):
        w = _random_channel(rng, real=bool(k % 2))
        minus, plus = transform_minus(w), transform_plus(w)
        rate = holevo_information(w)
        rate_minus, rate_plus = holevo_information(minus), holevo_information(plus)
        f = channel_fidelity(w)
        f_minus, f_plus = channel_fidelity(minus), channel_fidelity(plus)
        assert abs(rate_minus + rate_plus - 2 * rate) <= 1e-7
        assert rate_minus <= rate + 1e-8 and rate <= rate_plus + 1e-8
        assert math.sqrt(f_minus) <= 2 * math.sqrt(f) - f + 1e-8
        assert f_minus >= f - 1e-8 >= f_plus - 2e-8
        assert math.sqrt(f_minus) + math.sqrt(f_plus) <= 2 * math.sqrt(f) + 1e-8
        # single-step averages: the rate is a martingale, sqrt(F) a super-martingale
        assert abs(0.5 * rate_minus + 0.5 * rate_plus - rate) <= 1e-8
        assert 0.5 * math.sqrt(f_minus) + 0.5 * math.sqrt(f_plus) <= math.sqrt(f) + 1e-8


def test_erasure_minus_bound_is_tight():
    for eps in (0.3, 0.5, 0.7):
        w = BinaryCQChannel.bec(eps)
        f = channel_fidelity(w)
        got = math.sqrt(channel_fidelity(transform_minus(w)))
        assert abs(got - (2 * math.sqrt(f) - f)) <= 1e-9


def test_split_channel_level_one_matches_transforms():
    rng = np.random.default_rng(4)
    w = _random_channel(rng)
    p_minus = channel_params(split_channel(w, SplitChannelIndex(1, 1)))
    p_plus = channel_params(split_channel(w, SplitChannelIndex(1, 2)))
    assert abs(p_minus.fidelity - channel_fidelity(transform_minus(w))) <= 1e-12
    assert abs(p_plus.fidelity - channel_fidelity(transform_plus(w))) <= 1e-12


def test_split_channel_erasure_mixed_path():
    # expansion 10: plus first, then minus; scalar recursion gives 0.4375
    w = BinaryCQChannel.bec(0.5)
    ch = split_channel(w, SplitChannelIndex(2, 3))
    assert abs(root_channel_fidelity(ch) - 0.4375) <= 1e-12


def test_split_index_expansion():
    assert SplitChannelIndex(3, 1).expansion == (0, 0, 0)
    assert SplitChannelIndex(3, 8).expansion == (1, 1, 1)
    assert SplitChannelIndex(2, 3).expansion == (1, 0)
    assert SplitChannelIndex.from_expansion((1, 0)) == SplitChannelIndex(2, 3)
    with pytest.raises(ValueError):
        SplitChannelIndex(2, 5)


def test_recursive_matches_direct_materialization():
    rng = np.random.default_rng(5)
    for k in range(10):
        w = _random_channel(rng, real=bool(k % 2))
        states = (w.densified().states0[0], w.densified().states1[0])
        for n in (1, 2):
            params = split_params(w, n)
            for i in range(1, (1 << n) + 1):
                rate, fidelity = oracles.direct_split_params(states, n, i)
                assert abs(params[i - 1].holevo - rate) <= 1e-7
                assert abs(params[i - 1].fidelity - fidelity) <= 1e-7


def test_split_params_sums():
    rng = np.random.default_rng(6)
    channels = [BinaryCQChannel.bec(0.5), BinaryCQChannel.bsc(0.11),
                make_pure_overlap(0.5), _random_channel(rng), _random_channel(rng, True)]
    for w in channels:
        rate = holevo_information(w)
        root = root_channel_fidelity(w)
        for n in (1, 2, 3):
            params = split_params(w, n)
            assert abs(sum(p.holevo for p in params) - (1 << n) * rate) <= 1e-7
            assert sum(p.root_fidelity for p in params) <= (1 << n) * root + 1e-7


def test_split_params_trivial_channels():
    perfect = split_params(make_pure_overlap(0.0), 2)
    assert all(abs(p.holevo - 1.0) <= 1e-9 and p.fidelity <= 1e-9 for p in perfect)
    useless = split_params(make_pure_overlap(1.0), 2)
    assert all(p.holevo <= 1e-9 and abs(p.fidelity - 1.0) <= 1e-9 for p in useless)


def test_erasure_synthesis_equals_scalar_recursion():
    for eps in (0.3, 0.5, 0.7):
        got = np.array(split_root_fidelities(BinaryCQChannel.bec(eps), 3))
        np.testing.assert_allclose(got, oracles.z_recursion(eps, 3), atol=1e-9)


def test_fast_sweeps_agree_with_split_params():
    rng = np.random.default_rng(7)
    for w in (BinaryCQChannel.bec(0.4), _random_channel(rng), _random_channel(rng, True)):
        params = split_params(w, 2)
        rates = split_rates(w, 2)
        roots = split_root_fidelities(w, 2)
        for p, r, z in zip(params, rates, roots):
            assert abs(p.holevo - r) <= 1e-9
            assert abs(p.root_fidelity - z) <= 1e-9


def test_branch_merging_keeps_symmetric_channels_small():
    w = BinaryCQChannel.bsc(0.25)
    ch = split_channel(w, SplitChannelIndex(3, 8))  # three plus steps
    assert ch.branch_count < 128  # duplicates merged along the way
    assert abs(root_channel_fidelity(ch) - oracles.z_recursion(2 * math.sqrt(0.25 * 0.75), 3)[7]) <= 1e-9


def test_budget_signal():
    w = make_pure_overlap(0.5)
    tiny = Budget(max_quantum_dim=8, max_branches=4, max_dense_dim=8)
    with pytest.raises(BudgetExceeded):
        split_channel(w, SplitChannelIndex(2, 4), tiny)
    try:
        split_params(w, 3, Budget(max_dense_dim=16))
    except BudgetExceeded as exc:
        assert exc.requested > exc.cap
    else:
        raise AssertionError("expected a BudgetExceeded signal")


def test_budget_from_env(monkeypatch):
    monkeypatch.setenv("CQPOLAR_BUDGET", "1024,64")
    b = Budget.from_env()
    assert b.max_quantum_dim == 1024 and b.max_branches == 64
    monkeypatch.setenv("CQPOLAR_BUDGET", "junk")
    with pytest.raises(ValueError):
        Budget.from_env()


def test_pure_state_ensemble_validation():
    good = PureStateEnsemble(np.array([0.5, 0.5]),
                             np.array([[1.0, 0.3], [0.3, 1.0]]))
    assert abs(good.spectrum().sum() - 1.0) <= 1e-12
    with pytest.raises(ValueError, match="diagonal"):
        PureStateEnsemble(np.array([0.5, 0.5]), np.array([[2.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError, match="probability"):
        PureStateEnsemble(np.array([0.9, 0.5]), np.eye(2))


def test_gram_backend_trivial_overlaps():
    perfect = gram_split_params(0.0, 2)
    assert all(p.fidelity <= 1e-9 and abs(p.holevo - 1.0) <= 1e-9
               for p in perfect.values())
    useless = gram_split_params(1.0, 2)
    assert all(abs(p.fidelity - 1.0) <= 1e-9 and p.holevo <= 1e-9
               for p in useless.values())


def test_gram_backend_matches_dense():
    overlap = 0.6065
    dense = split_params(make_pure_overlap(overlap), 3)
    gram = gram_split_params(overlap, 3)
    for i, p in gram.items():
        assert abs(p.holevo - dense[i - 1].holevo) <= 1e-7
        assert abs(p.fidelity - dense[i - 1].fidelity) <= 1e-7


def test_gram_backend_index_subset_and_budget():
    params = gram_split_params(0.5, 4, indices=(16,))
    assert set(params) == {16}
    with pytest.raises(BudgetExceeded):
        gram_split_params(0.5, 4, indices=(1,), budget=Budget(max_dense_dim=8))
