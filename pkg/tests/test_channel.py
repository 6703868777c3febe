import json
import math

import numpy as np
import pytest

from cqpolar import linalg
from cqpolar.channel import (BinaryCQChannel, ChannelParams, channel_fidelity,
                             channel_from_spec, channel_params,
                             holevo_entropy_bound_from_fidelity,
                             holevo_information, holevo_lower_bound_from_fidelity,
                             holevo_upper_bound_from_fidelity, load_channel,
                             make_classical, make_pure_overlap,
                             root_channel_fidelity)
from cqpolar.synthesis import transform_plus

import oracles


def test_bsc_embedding():
    w = BinaryCQChannel.bsc(0.25)
    assert abs(channel_fidelity(w) - 0.75) <= 1e-12
    assert abs(root_channel_fidelity(w) - 2 * math.sqrt(0.25 * 0.75)) <= 1e-12


def test_bec_embedding():
    for eps in (0.0, 0.3, 0.5, 1.0):
        w = BinaryCQChannel.bec(eps)
        assert abs(root_channel_fidelity(w) - eps) <= 1e-12


def test_noiseless_bit():
    w = make_classical([[1.0, 0.0], [0.0, 1.0]])
    assert channel_fidelity(w) <= 1e-12
    assert abs(holevo_information(w) - 1.0) <= 1e-10


def test_pure_overlap_params():
    w = make_pure_overlap(0.5)
    assert abs(channel_fidelity(w) - 0.25) <= 1e-12
    # mean-state eigenvalues are (1 +- 0.5)/2, so the rate is H2(0.25)
    assert abs(holevo_information(w) - linalg.binary_entropy(0.25)) <= 1e-9
    assert abs(holevo_information(make_pure_overlap(0.0)) - 1.0) <= 1e-10
    assert holevo_information(make_pure_overlap(1.0)) <= 1e-10
    with pytest.raises(ValueError):
        make_pure_overlap(1.5)


def test_bpsk_preset():
    w = BinaryCQChannel.bpsk(0.5)
    assert abs(channel_fidelity(w) - math.exp(-1.0)) <= 1e-12


def test_single_branch_fidelity_matches_operator_level():
    rng = np.random.default_rng(0)
    a = oracles.random_density(rng)
    b = oracles.random_density(rng)
    w = BinaryCQChannel.from_states(a, b)
    assert abs(channel_fidelity(w) - linalg.fidelity(a, b)) <= 1e-12


def test_equal_outputs_give_unit_fidelity_zero_rate():
    rng = np.random.default_rng(1)
    a = oracles.random_density(rng)
    w = BinaryCQChannel.from_states(a, a.copy())
    assert abs(channel_fidelity(w) - 1.0) <= 1e-9
    assert abs(holevo_information(w)) <= 1e-9


def test_block_diagonal_holevo_matches_embedded_oracle():
    rng = np.random.default_rng(2)
    for real in (False, True):
        base = BinaryCQChannel.from_states(oracles.random_density(rng, real=real),
                                           oracles.random_density(rng, real=real))
        multi = transform_plus(base)  # two branches, still small enough to embed
        assert multi.branch_count * multi.quantum_dim <= 64
        direct = oracles.embedded_holevo(multi.weights,
                                         multi.densified().states0,
                                         multi.densified().states1)
        assert abs(holevo_information(multi) - direct) <= 1e-9


def test_fidelity_bounds_on_rate():
    assert holevo_lower_bound_from_fidelity(1.0) == 0.0
    assert abs(holevo_lower_bound_from_fidelity(0.0) - 1.0) <= 1e-12
    assert abs(holevo_lower_bound_from_fidelity(0.25) - math.log2(4.0 / 3.0)) <= 1e-12
    assert holevo_upper_bound_from_fidelity(1.0) == 0.0
    assert abs(holevo_upper_bound_from_fidelity(0.0) - 1.0) <= 1e-12
    assert abs(holevo_upper_bound_from_fidelity(0.75) - 0.5) <= 1e-12
    for bad in (-0.1, 1.1):
        with pytest.raises(ValueError):
            holevo_lower_bound_from_fidelity(bad)
        with pytest.raises(ValueError):
            holevo_upper_bound_from_fidelity(bad)


def test_entropy_bound_tightens_sqrt_bound():
    for f in np.linspace(0.0, 1.0, 41):
        assert (holevo_entropy_bound_from_fidelity(f)
                <= holevo_upper_bound_from_fidelity(f) + 1e-12)


def test_rate_sits_in_fidelity_sandwich():
    rng = np.random.default_rng(3)
    channels = [BinaryCQChannel.bsc(0.11), BinaryCQChannel.bec(0.5),
                make_pure_overlap(0.5)]
    channels += [BinaryCQChannel.from_states(oracles.random_density(rng),
                                             oracles.random_density(rng))
                 for _ in range(5)]
    for w in channels:
        p = channel_params(w)  # ChannelParams itself validates the sandwich
        assert 0.0 <= p.holevo <= 1.0 + 1e-9
        assert abs(p.root_fidelity ** 2 - p.fidelity) <= 1e-12


def test_channel_params_rejects_inconsistent_pair():
    with pytest.raises(ValueError, match="sandwich"):
        ChannelParams(holevo=0.9, fidelity=0.9)


def test_channel_validation_errors():
    with pytest.raises(ValueError, match="sum"):
        make_classical([[0.6, 0.3], [0.5, 0.5]])
    with pytest.raises(ValueError, match="negative"):
        make_classical([[1.2, -0.2], [0.5, 0.5]])
    with pytest.raises(ValueError, match="weights"):
        BinaryCQChannel([0.5, 0.4], np.zeros((2, 2)) + 0.5, np.zeros((2, 2)) + 0.5)


def test_channel_is_immutable():
    w = BinaryCQChannel.bsc(0.1)
    with pytest.raises(AttributeError):
        w.weights = np.array([1.0])
    with pytest.raises(ValueError):
        w.states0[0, 0] = 2.0


def test_densified_preserves_parameters():
    w = BinaryCQChannel.bec(0.4)
    assert w.is_diagonal
    dense = w.densified()
    assert not dense.is_diagonal
    assert abs(channel_fidelity(w) - channel_fidelity(dense)) <= 1e-12
    assert abs(holevo_information(w) - holevo_information(dense)) <= 1e-10


def test_channel_spec_presets():
    w = channel_from_spec({"preset": "bsc", "param": 0.25})
    assert abs(channel_fidelity(w) - 0.75) <= 1e-12
    with pytest.raises(ValueError, match="preset"):
        channel_from_spec({"preset": "awgn", "param": 1.0})
    with pytest.raises(ValueError, match="param"):
        channel_from_spec({"preset": "bsc"})


def test_channel_spec_dense_roundtrip(tmp_path):
    rho0 = np.array([[0.75, 0.25j], [-0.25j, 0.25]])
    rho1 = np.array([[0.5, 0.0], [0.0, 0.5]])
    doc = {"dim": 2,
           "rho0": [[[v.real, v.imag] for v in row] for row in rho0],
           "rho1": [[[v.real, v.imag] for v in row] for row in rho1]}
    w = channel_from_spec(doc)
    assert abs(channel_fidelity(w) - linalg.fidelity(rho0, rho1)) <= 1e-12
    path = tmp_path / "chan.json"
    path.write_text(json.dumps(doc))
    w2 = load_channel(str(path))
    assert abs(channel_fidelity(w2) - channel_fidelity(w)) <= 1e-15


def test_channel_spec_reports_violations():
    bad = {"dim": 2,
           "rho0": [[[0.9, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.9, 0.0]]],
           "rho1": [[[1.0, 0.0], [0.2, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}
    with pytest.raises(ValueError) as err:
        channel_from_spec(bad)
    message = str(err.value)
    assert "rho0" in message and "trace" in message
    assert "rho1" in message and "Hermitian" in message
