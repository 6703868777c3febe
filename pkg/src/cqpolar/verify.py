"""Numerical verification suites for every identity the toolkit relies on.

Each suite returns :class:`CheckRow` records (one per proposition/channel
combination) with the worst observed violation and the tolerance it is held
to; the CLI renders them as a table and fails on any violation. A mutation
switch deliberately corrupts one fidelity computation so the suite's own
sensitivity can be demonstrated.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import bounds as bounds_mod
from . import linalg
from .budget import Budget
from .channel import (BinaryCQChannel, channel_fidelity, channel_params,
                      holevo_information, holevo_lower_bound_from_fidelity,
                      holevo_upper_bound_from_fidelity, root_channel_fidelity)
from .construction import choose_frozen_bits, error_bound, select_information_set
from .decoder import decode_monte_carlo, exact_block_error, sen_bound_check
from .encoding import encode, encode_many, generator_matrix
from .synthesis import (split_params, split_rates, split_root_fidelities,
                        transform_minus, transform_plus)


@dataclass(frozen=True)
class CheckRow:
    suite: str
    proposition: str
    channel: str
    level: int
    max_violation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance


def format_table(rows) -> str:
    header = f"{'SUITE':<12} {'PROPOSITION':<44} {'CHANNEL':<18} {'n':>2} " \
             f"{'MAX VIOLATION':>14} {'TOLERANCE':>10} {'STATUS':>6}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(f"{r.suite:<12} {r.proposition:<44} {r.channel:<18} {r.level:>2} "
                     f"{r.max_violation:>14.3e} {r.tolerance:>10.1e} "
                     f"{'ok' if r.passed else 'FAIL':>6}")
    failed = sum(not r.passed for r in rows)
    lines.append(f"{len(rows)} checks, {failed} failed")
    return "\n".join(lines)


def standard_channels() -> list[tuple[str, BinaryCQChannel]]:
    return [
        ("bsc:0.11", BinaryCQChannel.bsc(0.11)),
        ("bec:0.5", BinaryCQChannel.bec(0.5)),
        ("pure_overlap:0.5", BinaryCQChannel.pure_overlap(0.5)),
    ]


def random_channel(rng: np.random.Generator, dim: int = 2,
                   real: bool = False) -> BinaryCQChannel:
    """Random qubit-output (or dim-output) channel from Ginibre states.

    ``real=True`` draws real symmetric states; they exercise the same code
    paths at roughly a third of the LAPACK cost, so mixed suites alternate.
    """
    states = []
    for _ in range(2):
        g = rng.normal(size=(dim, dim))
        if not real:
            g = g + 1j * rng.normal(size=(dim, dim))
        rho = g @ g.conj().T
        states.append(rho / np.trace(rho).real)
    return BinaryCQChannel.from_states(*states)


def _channel_suite(seed: int, extra_random: int) -> list[tuple[str, BinaryCQChannel]]:
    rng = np.random.default_rng(seed)
    chans = standard_channels()
    chans += [(f"random[{k}]", random_channel(rng, real=bool(k % 2)))
              for k in range(extra_random)]
    return chans


# -- rate/reliability sandwich ----------------------------------------------

def suite_sandwich(seed: int = 0, budget: Budget | None = None,
                   max_level: int = 3, random_channels: int = 2, **_) -> list[CheckRow]:
    """Rate stays between the two fidelity bounds on every synthesized channel."""
    rows = []
    for label, ch in _channel_suite(seed, random_channels):
        worst = 0.0
        for n in range(max_level + 1):
            for p in split_params(ch, n, budget):
                lo = holevo_lower_bound_from_fidelity(min(max(p.fidelity, 0.0), 1.0))
                hi = holevo_upper_bound_from_fidelity(min(max(p.fidelity, 0.0), 1.0))
                worst = max(worst, lo - p.holevo, p.holevo - hi)
        rows.append(CheckRow("sandwich", "rate within fidelity sandwich", label,
                             max_level, worst, 1e-8))
    return rows


# -- single polarization step -------------------------------------------------

def suite_single_step(seed: int = 0, budget: Budget | None = None,
                      random_channels: int = 10, mutate: bool = False, **_) -> list[CheckRow]:
    """Rate conservation and the reliability relations of one step."""
    rows = []
    for label, ch in _channel_suite(seed, random_channels):
        minus = transform_minus(ch, budget)
        plus = transform_plus(ch, budget)
        rate = holevo_information(ch)
        rate_minus = holevo_information(minus)
        rate_plus = holevo_information(plus)
        f = channel_fidelity(ch)
        f_minus = channel_fidelity(minus)
        f_plus = channel_fidelity(plus)
        if mutate:
            f_plus *= 1.05  # negative control: must trip the plus-step identity
        rows += [
            CheckRow("single-step", "rate conservation I- + I+ = 2I", label, 1,
                     abs(rate_minus + rate_plus - 2.0 * rate), 1e-7),
            CheckRow("single-step", "polarization direction I- <= I <= I+", label, 1,
                     max(rate_minus - rate, rate - rate_plus, 0.0), 1e-8),
            CheckRow("single-step", "plus step squares root fidelity", label, 1,
                     abs(math.sqrt(f_plus) - f), 1e-8),
            CheckRow("single-step", "minus step root-fidelity upper bound", label, 1,
                     max(math.sqrt(f_minus) - (2.0 * math.sqrt(f) - f), 0.0), 1e-8),
            CheckRow("single-step", "fidelity ordering F- >= F >= F+", label, 1,
                     max(f - f_minus, f_plus - f, 0.0), 1e-8),
            CheckRow("single-step", "reliability sum below 2 sqrt(F)", label, 1,
                     max(math.sqrt(f_minus) + math.sqrt(f_plus) - 2.0 * math.sqrt(f), 0.0),
                     1e-8),
            CheckRow("single-step", "half-sum martingale step for the rate", label, 1,
                     abs(0.5 * rate_minus + 0.5 * rate_plus - rate), 1e-8),
            CheckRow("single-step", "half-sum super-martingale step for sqrt(F)", label, 1,
                     max(0.5 * math.sqrt(f_minus) + 0.5 * math.sqrt(f_plus) - math.sqrt(f),
                         0.0), 1e-8),
        ]
    return rows


def suite_rate_conservation(seed: int = 0, budget: Budget | None = None,
                            max_level: int = 3, random_channels: int = 20,
                            fidelity_channels: int = 6, **_) -> list[CheckRow]:
    """Total rate across all split channels equals N I(W); total root
    fidelity never grows. The fidelity rows run on a subset (they carry a
    full eigenvector decomposition per branch)."""
    rows = []
    channels = _channel_suite(seed, random_channels)
    for pos, (label, ch) in enumerate(channels):
        base_rate = holevo_information(ch)
        base_root = root_channel_fidelity(ch)
        for n in range(1, max_level + 1):
            total_rate = sum(split_rates(ch, n, budget))
            rows.append(CheckRow("conservation", "total rate equals N I(W)", label, n,
                                 abs(total_rate - (1 << n) * base_rate), 1e-7))
            if pos < fidelity_channels:
                total_root = sum(split_root_fidelities(ch, n, budget))
                rows.append(CheckRow("conservation", "total sqrt(F) at most N sqrt(F(W))",
                                     label, n,
                                     max(total_root - (1 << n) * base_root, 0.0), 1e-7))
    return rows


# -- erasure embeddings: the scalar recursion is exact ------------------------

def classical_z_recursion(z0: float, n: int) -> np.ndarray:
    """Scalar reliability recursion z -> (2z - z^2, z^2), all indices at level n."""
    z = np.array([z0])
    for _ in range(n):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2.0 * z - z ** 2
        nxt[1::2] = z ** 2
        z = nxt
    return z


def suite_erasure_equality(budget: Budget | None = None, max_level: int = 3,
                           epsilons=(0.3, 0.5, 0.7), **_) -> list[CheckRow]:
    rows = []
    for eps in epsilons:
        ch = BinaryCQChannel.bec(eps)
        minus = transform_minus(ch, budget)
        f = channel_fidelity(ch)
        rows.append(CheckRow("erasure", "minus bound met with equality", f"bec:{eps}", 1,
                             abs(math.sqrt(channel_fidelity(minus))
                                 - (2.0 * math.sqrt(f) - f)), 1e-9))
        exact = np.array(split_root_fidelities(ch, max_level, budget))
        oracle = classical_z_recursion(eps, max_level)
        rows.append(CheckRow("erasure", "synthesis matches scalar recursion",
                             f"bec:{eps}", max_level,
                             float(np.max(np.abs(exact - oracle))), 1e-9))
    return rows


# -- interval propagation ------------------------------------------------------

def suite_bounds(seed: int = 0, budget: Budget | None = None, exact_level: int = 3,
                 deep_level: int = 20, random_channels: int = 3, **_) -> list[CheckRow]:
    rows = []
    for label, ch in _channel_suite(seed, random_channels):
        f0 = root_channel_fidelity(ch)
        exact = np.array(split_root_fidelities(ch, exact_level, budget))
        table = bounds_mod.propagate_all(f0, exact_level)
        rows.append(CheckRow("bounds", "intervals contain exact sqrt(F)", label, exact_level,
                             float(np.max(np.maximum(table.f_lo - exact,
                                                     exact - table.f_hi))), 1e-9))
        rate = holevo_information(ch)
        deep = bounds_mod.propagate_all(f0, deep_level)
        good_cap = rate / math.log2(2.0 / 1.01) + 0.02
        good_fraction = float(np.mean(deep.f_hi <= 0.01))
        rows.append(CheckRow("bounds", "good fraction below rate cap", label, deep_level,
                             max(good_fraction - good_cap, 0.0), 1e-12))
        fractions = []
        decay = []
        for n in range(4, deep_level + 1):
            t = bounds_mod.propagate_all(f0, n)
            fractions.append(float(np.mean(t.f_hi <= 0.01)))
            k = int((1 << n) * rate / 2.0)
            decay.append(float(np.sort(t.f_hi)[:k].sum()) if k else 0.0)
        worst_trend = max((fractions[k] - fractions[k + 1]
                           for k in range(len(fractions) - 1)), default=0.0)
        rows.append(CheckRow("bounds", "good fraction non-decreasing in n", label,
                             deep_level, max(worst_trend, 0.0), 1e-12))
        worst_decay = max((decay[k + 1] - decay[k]
                           for k in range(len(decay) - 1)), default=0.0)
        rows.append(CheckRow("bounds", "best-set reliability sum decays with n", label,
                             deep_level, max(worst_decay, 0.0), 1e-12))
    return rows


# -- decoder ---------------------------------------------------------------------

def _decoder_configs() -> list[tuple[str, BinaryCQChannel, int, int]]:
    return [
        ("pure_overlap:0.5", BinaryCQChannel.pure_overlap(0.5), 1, 1),
        ("pure_overlap:0.5", BinaryCQChannel.pure_overlap(0.5), 2, 1),
        ("pure_overlap:0.5", BinaryCQChannel.pure_overlap(0.5), 2, 2),
        ("bsc:0.25", BinaryCQChannel.bsc(0.25), 2, 2),
        ("bec:0.5", BinaryCQChannel.bec(0.5), 2, 2),
    ]


def suite_decoder(seed: int = 0, budget: Budget | None = None, trials: int = 2000,
                  **_) -> list[CheckRow]:
    rows = []
    for label, ch, n, k in _decoder_configs():
        values = np.array(split_root_fidelities(ch, n, budget))
        info = select_information_set(values, k)
        spec = choose_frozen_bits(1 << n, info)
        bound = error_bound(values, info)
        exact_avg = exact_block_error(ch, spec, budget, average_frozen=True)
        exact_zeros = exact_block_error(ch, spec, budget)
        rows.append(CheckRow("decoder", "average block error within bound", label, n,
                             max(exact_avg - bound, 0.0), 1e-8))
        report = decode_monte_carlo(ch, spec, trials=trials, seed=seed, budget=budget,
                                    sen_checks=True)
        sigma = math.sqrt(max(exact_zeros * (1.0 - exact_zeros), 1e-12) / report.trials)
        rows.append(CheckRow("decoder", "Monte Carlo agrees with exact (4 sigma)", label, n,
                             max(abs(report.mc_estimate - exact_zeros) - 4.0 * sigma, 0.0),
                             1e-9))
        rows.append(CheckRow("decoder", "union bound holds on sampled paths", label, n,
                             float(report.sen_checks_total - report.sen_checks_passed),
                             0.0))
    plus = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    zero = np.diag([1.0, 0.0]).astype(complex)
    check = sen_bound_check([plus, zero], zero)
    rows.append(CheckRow("decoder", "union bound on non-commuting counterexample",
                         "projector pair", 1, max(check.lhs - check.rhs, 0.0), 1e-9))
    classical_sum = float(np.trace((np.eye(2) - plus) @ zero).real
                          + np.trace((np.eye(2) - zero) @ zero).real)
    rows.append(CheckRow("decoder", "commuting-style bound fails on counterexample",
                         "projector pair", 1,
                         max(classical_sum - check.lhs, 0.0), 1e-9))
    return rows


# -- encoder ------------------------------------------------------------------

def suite_encoder(seed: int = 0, **_) -> list[CheckRow]:
    rng = np.random.default_rng(seed)
    rows = []
    worst = 0.0
    for n in (1, 2, 3):
        block = 1 << n
        g = generator_matrix(block)
        u = ((np.arange(1 << block)[:, None] >> np.arange(block)[None, ::-1]) & 1)
        expect = (u.astype(np.int64) @ g.astype(np.int64)) % 2
        worst = max(worst, float(np.abs(encode_many(u.astype(np.uint8))
                                        - expect.astype(np.uint8)).max()))
    rows.append(CheckRow("encoder", "butterfly equals generator multiply", "exhaustive", 3,
                         worst, 0.0))
    block = 64
    g = generator_matrix(block)
    u = rng.integers(0, 2, size=(256, block)).astype(np.uint8)
    expect = (u.astype(np.int64) @ g.astype(np.int64)) % 2
    rows.append(CheckRow("encoder", "butterfly equals generator multiply", "random-64", 6,
                         float(np.abs(encode_many(u) - expect.astype(np.uint8)).max()), 0.0))
    printed_g4 = np.array([[1, 0, 0, 0], [1, 0, 1, 0], [1, 1, 0, 0], [1, 1, 1, 1]],
                          dtype=np.uint8)
    rows.append(CheckRow("encoder", "G4 matches the reference matrix", "N=4", 2,
                         float(np.abs(generator_matrix(4) - printed_g4).max()), 0.0))
    g8 = generator_matrix(8).astype(np.int64)
    rows.append(CheckRow("encoder", "G8 is self-inverse over GF(2)", "N=8", 3,
                         float(np.abs((g8 @ g8) % 2 - np.eye(8, dtype=np.int64)).max()), 0.0))
    big = rng.integers(0, 2, size=1 << 20).astype(np.uint8)
    start = time.perf_counter()
    out = encode(big)
    elapsed = time.perf_counter() - start
    assert out.shape == big.shape
    rows.append(CheckRow("encoder", "single encode at N=2^20 below 1 s", "timing", 20,
                         max(elapsed - 1.0, 0.0), 0.0))
    return rows


SUITES = {
    "sandwich": suite_sandwich,
    "single-step": suite_single_step,
    "conservation": suite_rate_conservation,
    "erasure": suite_erasure_equality,
    "bounds": suite_bounds,
    "decoder": suite_decoder,
    "encoder": suite_encoder,
}


def run_suites(selector: str = "all", seed: int = 0, budget: Budget | None = None,
               mutate: bool = False) -> list[CheckRow]:
    if selector == "all":
        names = list(SUITES)
    elif selector in SUITES:
        names = [selector]
    else:
        raise ValueError(f"unknown suite {selector!r}; expected 'all' or one of {list(SUITES)}")
    rows = []
    for name in names:
        rows += SUITES[name](seed=seed, budget=budget, mutate=mutate)
    return rows
