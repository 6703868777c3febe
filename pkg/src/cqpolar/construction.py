"""Information-set selection and the block-error bound of the coset code.

The coding rule freezes the least reliable positions: the K information
indices are those with the smallest root fidelity (certified upper bound
under the interval backend), ties broken toward the smaller index. The
resulting ensemble-average block error is bounded by
``2 sqrt(sum_{i in A} sqrt(F(W_N^(i))) / 2)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bounds import ReliabilityBounds, hybrid_bounds, propagate_all
from .budget import Budget
from .channel import BinaryCQChannel, root_channel_fidelity
from .encoding import CodeSpec
from .synthesis import split_params

CONSTRUCTION_SCHEMA = "cqpolar.construction/1"
BACKENDS = ("exact", "bounds", "hybrid")


def _reliability_values(reliabilities) -> np.ndarray:
    """Per-index root fidelities, taking the upper end of interval tables."""
    if isinstance(reliabilities, ReliabilityBounds):
        return np.asarray(reliabilities.f_hi, dtype=float)
    values = np.asarray(reliabilities, dtype=float)
    if values.ndim != 1:
        raise ValueError("reliabilities must be a flat per-index array")
    return values


def select_information_set(reliabilities, info_count: int) -> tuple[int, ...]:
    """The K indices (1-based) of smallest reliability value.

    A stable sort makes ties resolve toward the smaller index, so the choice
    is deterministic and reproducible.
    """
    values = _reliability_values(reliabilities)
    if not 0 <= info_count <= values.size:
        raise ValueError(f"K={info_count} outside 0..{values.size}")
    order = np.argsort(values, kind="stable")
    return tuple(sorted(int(k) + 1 for k in order[:info_count]))


def error_bound(reliabilities, info_set) -> float:
    """Ensemble-average block-error bound 2 sqrt(sum_{i in A} f_i / 2)."""
    values = _reliability_values(reliabilities)
    indices = np.asarray(sorted(info_set), dtype=int)
    if indices.size == 0:
        return 0.0
    if indices.min() < 1 or indices.max() > values.size:
        raise ValueError("info_set indices outside 1..N")
    return float(2.0 * np.sqrt(0.5 * values[indices - 1].sum()))


def choose_frozen_bits(block_length: int, info_set, policy: str = "zeros",
                       seed: int | None = None) -> CodeSpec:
    """Fix the frozen vector; "zeros" or "random" (reproducible via seed)."""
    info_set = tuple(sorted(int(i) for i in info_set))
    frozen_positions = sorted(set(range(1, block_length + 1)) - set(info_set))
    if policy == "zeros":
        frozen = {i: 0 for i in frozen_positions}
    elif policy == "random":
        rng = np.random.default_rng(seed)
        bits = rng.integers(0, 2, size=len(frozen_positions))
        frozen = {i: int(b) for i, b in zip(frozen_positions, bits)}
    else:
        raise ValueError(f"unknown frozen-bit policy {policy!r}")
    return CodeSpec(block_length, info_set, frozen)


@dataclass(frozen=True)
class ConstructionReport:
    """Outcome of one code construction run."""

    spec: CodeSpec
    backend: str
    reliabilities: np.ndarray         # per-index sqrt(F), upper end if bounded
    reliabilities_lo: np.ndarray | None  # lower end under interval backends
    error_bound: float

    def to_json(self) -> str:
        doc = {
            "schema": CONSTRUCTION_SCHEMA,
            "backend": self.backend,
            "block_length": self.spec.block_length,
            "K": self.spec.info_count,
            "info_set": list(self.spec.info_set),
            "frozen_bits": {str(i): int(b) for i, b in sorted(self.spec.frozen_bits.items())},
            "error_bound": self.error_bound,
            "reliabilities_hi": [float(v) for v in self.reliabilities],
        }
        if self.reliabilities_lo is not None:
            doc["reliabilities_lo"] = [float(v) for v in self.reliabilities_lo]
        return json.dumps(doc, sort_keys=True)


def construct_code(base: BinaryCQChannel, n: int, info_count: int,
                   backend: str = "hybrid", frozen_policy: str = "zeros",
                   seed: int | None = None,
                   budget: Budget | None = None) -> ConstructionReport:
    """Run the coding rule end to end for block length 2^n."""
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    budget = budget if budget is not None else Budget.from_env()
    lo = None
    if backend == "exact":
        values = np.array([p.root_fidelity for p in split_params(base, n, budget)])
    elif backend == "bounds":
        table = propagate_all(root_channel_fidelity(base), n)
        values, lo = table.f_hi, table.f_lo
    else:
        table = hybrid_bounds(base, n, budget=budget)
        values, lo = table.f_hi, table.f_lo
    info_set = select_information_set(values, info_count)
    spec = choose_frozen_bits(1 << n, info_set, policy=frozen_policy, seed=seed)
    return ConstructionReport(spec=spec, backend=backend, reliabilities=values,
                              reliabilities_lo=lo,
                              error_bound=error_bound(values, info_set))
