"""Resource caps for exact channel synthesis and decoding.

Exact synthesis squares the quantum dimension at every level and multiplies
branch counts, so every entry point takes a :class:`Budget` and raises
:class:`BudgetExceeded` (a typed signal, not a message) when the request does
not fit; callers catch it to fall back to certified bound propagation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_VAR = "CQPOLAR_BUDGET"


class BudgetExceeded(Exception):
    """Raised when a synthesis/decoding request exceeds the configured caps."""

    def __init__(self, what: str, requested: int, cap: int):
        super().__init__(f"{what}: requested {requested} exceeds cap {cap}")
        self.what = what
        self.requested = requested
        self.cap = cap


@dataclass(frozen=True)
class Budget:
    """Dimension and branch caps.

    ``max_quantum_dim`` caps the synthesized quantum dimension (diagonal
    channels store length-d vectors, so the full cap is usable there);
    ``max_dense_dim`` is a stricter cap for dense d x d matrices, whose
    memory grows quadratically. ``max_messages`` caps exhaustive decoding
    enumerations (2^K terms).
    """

    max_quantum_dim: int = 65536
    max_branches: int = 4096
    max_dense_dim: int = 4096
    max_messages: int = 4096

    @classmethod
    def from_env(cls) -> "Budget":
        """Default budget, with caps overridden by ``CQPOLAR_BUDGET``.

        The variable holds one or two comma-separated integers:
        ``"<max_quantum_dim>"`` or ``"<max_quantum_dim>,<max_branches>"``.
        """
        raw = os.environ.get(ENV_VAR)
        if not raw:
            return cls()
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        try:
            values = [int(p) for p in parts]
        except ValueError as exc:
            raise ValueError(f"cannot parse {ENV_VAR}={raw!r}: expected integers") from exc
        if len(values) == 1:
            return cls(max_quantum_dim=values[0],
                       max_dense_dim=min(values[0], cls.max_dense_dim))
        if len(values) == 2:
            return cls(max_quantum_dim=values[0], max_branches=values[1],
                       max_dense_dim=min(values[0], cls.max_dense_dim))
        raise ValueError(f"{ENV_VAR} takes at most two comma-separated integers")

    def check_dim(self, dim: int, diagonal: bool) -> None:
        cap = self.max_quantum_dim if diagonal else min(self.max_quantum_dim, self.max_dense_dim)
        if dim > cap:
            raise BudgetExceeded("quantum dimension", dim, cap)

    def check_branches(self, count: int) -> None:
        if count > self.max_branches:
            raise BudgetExceeded("branch count", count, self.max_branches)

    def check_messages(self, count: int) -> None:
        if count > self.max_messages:
            raise BudgetExceeded("message enumeration", count, self.max_messages)
