"""Certified interval recursion on the root fidelity of all split channels.

The plus step squares the root fidelity exactly; the minus step is only
bracketed: f' <= 2f - f^2 from above and F(W-) >= F(W), i.e. f' >= f, from
below. Propagating [f_lo, f_hi] with the monotone maps

    minus: [f_lo, 2 f_hi - f_hi^2]        plus: [f_lo^2, f_hi^2]

therefore encloses the true value at every index and any depth; for channels
whose minus step meets the upper relation with equality (erasure embeddings)
the intervals stay tight. Code construction only consumes the upper end.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .channel import (BinaryCQChannel, holevo_lower_bound_from_fidelity,
                      holevo_upper_bound_from_fidelity, root_channel_fidelity)
from .budget import Budget, BudgetExceeded
from .synthesis import split_params

MAX_LEVEL = 24
BOUNDS_CSV_SCHEMA = "cqpolar.bounds/1"


@dataclass(frozen=True)
class ReliabilityInterval:
    """Lower/upper bounds on sqrt(F) for one synthesized channel."""

    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not 0.0 <= self.f_lo <= self.f_hi <= 1.0:
            raise ValueError(f"invalid interval [{self.f_lo!r}, {self.f_hi!r}]")

    @property
    def width(self) -> float:
        return self.f_hi - self.f_lo


def propagate_minus(iv: ReliabilityInterval) -> ReliabilityInterval:
    """Interval for the minus child; 2f - f^2 is increasing on [0, 1]."""
    return ReliabilityInterval(iv.f_lo, 2.0 * iv.f_hi - iv.f_hi ** 2)


def propagate_plus(iv: ReliabilityInterval) -> ReliabilityInterval:
    """Interval for the plus child; the squaring relation is exact."""
    return ReliabilityInterval(iv.f_lo ** 2, iv.f_hi ** 2)


class ReliabilityBounds:
    """Intervals for all 2^n indices at one level, stored as flat arrays."""

    __slots__ = ("n", "f_lo", "f_hi")

    def __init__(self, n: int, f_lo: np.ndarray, f_hi: np.ndarray):
        self.n = n
        self.f_lo = f_lo
        self.f_hi = f_hi
        if f_lo.shape != (1 << n,) or f_hi.shape != f_lo.shape:
            raise ValueError("bound arrays must have length 2^n")

    def __len__(self) -> int:
        return self.f_lo.size

    def __getitem__(self, i: int) -> ReliabilityInterval:
        """Interval of the 1-based split-channel index i."""
        if not 1 <= i <= len(self):
            raise IndexError(f"index {i} outside 1..{len(self)}")
        return ReliabilityInterval(float(self.f_lo[i - 1]), float(self.f_hi[i - 1]))

    def holevo_lo(self) -> np.ndarray:
        """Certified rate floors from the fidelity upper bounds."""
        return np.log2(2.0 / (1.0 + self.f_hi))

    def holevo_hi(self) -> np.ndarray:
        """Certified rate ceilings from the fidelity lower bounds."""
        return np.sqrt(1.0 - self.f_lo ** 2)


def _propagate_level(f_lo: np.ndarray, f_hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    new_lo = np.empty(2 * f_lo.size)
    new_hi = np.empty(2 * f_hi.size)
    new_lo[0::2] = f_lo
    new_hi[0::2] = 2.0 * f_hi - f_hi ** 2
    new_lo[1::2] = f_lo ** 2
    new_hi[1::2] = f_hi ** 2
    return new_lo, new_hi


def propagate_all(f0: float, n: int) -> ReliabilityBounds:
    """Propagate from the base root fidelity f0 down to all 2^n indices.

    Index i's interval is the result of applying the single-step maps along
    the binary expansion of i-1, most significant bit first.
    """
    if not 0.0 <= f0 <= 1.0:
        raise ValueError(f"base root fidelity {f0!r} outside [0, 1]")
    if not 0 <= n <= MAX_LEVEL:
        raise ValueError(f"level {n} outside 0..{MAX_LEVEL}")
    f_lo = np.array([f0])
    f_hi = np.array([f0])
    for _ in range(n):
        f_lo, f_hi = _propagate_level(f_lo, f_hi)
    return ReliabilityBounds(n, f_lo, f_hi)


def propagate_from_seed(seed_root_fidelities, n: int) -> ReliabilityBounds:
    """Propagate starting from exact values for every index at some level n0."""
    seed = np.asarray(seed_root_fidelities, dtype=float)
    if seed.ndim != 1 or seed.size & (seed.size - 1):
        raise ValueError("seed must hold 2^n0 values")
    n0 = seed.size.bit_length() - 1
    if not n0 <= n <= MAX_LEVEL:
        raise ValueError(f"target level {n} outside {n0}..{MAX_LEVEL}")
    if seed.min() < -1e-12 or seed.max() > 1 + 1e-12:
        raise ValueError("seed values outside [0, 1]")
    f_lo = np.clip(seed, 0.0, 1.0)
    f_hi = f_lo.copy()
    for _ in range(n - n0):
        f_lo, f_hi = _propagate_level(f_lo, f_hi)
    return ReliabilityBounds(n, f_lo, f_hi)


DEFAULT_EXACT_LEVELS = 3


def hybrid_bounds(base: BinaryCQChannel, n: int, exact_levels: int | None = None,
                  budget: Budget | None = None) -> ReliabilityBounds:
    """Exact synthesis down to a feasible prefix level, intervals below.

    Tries ``exact_levels`` (default ``min(3, n)``, i.e. exact block length 8)
    and shrinks one level at a time while the synthesis budget is exceeded,
    bottoming out at pure propagation from the base root fidelity.
    """
    budget = budget if budget is not None else Budget.from_env()
    n0 = min(n, DEFAULT_EXACT_LEVELS if exact_levels is None else exact_levels)
    while n0 > 0:
        try:
            seed = [p.root_fidelity for p in split_params(base, n0, budget)]
        except BudgetExceeded:
            n0 -= 1
            continue
        return propagate_from_seed(seed, n)
    return propagate_all(root_channel_fidelity(base), n)


def write_bounds_csv(path: str, table: ReliabilityBounds) -> None:
    """Write index, f_lo, f_hi and the implied rate bounds per index."""
    holevo_lo = table.holevo_lo()
    holevo_hi = table.holevo_hi()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# schema={BOUNDS_CSV_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(["index", "f_lo", "f_hi", "holevo_lo", "holevo_hi"])
        for k in range(len(table)):
            writer.writerow([k + 1, f"{table.f_lo[k]:.12g}", f"{table.f_hi[k]:.12g}",
                             f"{holevo_lo[k]:.12g}", f"{holevo_hi[k]:.12g}"])
