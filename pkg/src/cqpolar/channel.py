"""Binary-input channels with quantum outputs and their two scalar parameters.

A channel maps a bit ``u`` to a quantum state. Channels synthesized further
down the pipeline additionally carry classical side registers; both cases are
represented uniformly as a weighted ensemble of *branches*, one branch per
classical register value ``c``:

    output(u) = sum_c weight(c) |c><c| (x) sigma_u(c)

Conditional states ``sigma_u(c)`` are stored either as dense density matrices
of shape ``(d, d)`` or, for channels whose states all commute in the
computational basis (classical embeddings), as diagonal probability vectors of
shape ``(d,)``. Both parameters of interest decompose over branches, so the
classical register never inflates the quantum dimension:

    sqrt(F(W)) = sum_c weight(c) sqrt(F(sigma_0(c), sigma_1(c)))
    I(W)       = sum_c weight(c) I(sigma_0(c), sigma_1(c))
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import linalg

WEIGHT_ATOL = 1e-10
PRESET_NAMES = ("bsc", "bec", "pure_overlap", "bpsk")


def state_root_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Root fidelity of two conditional states (diagonal or dense)."""
    if a.ndim == 1:
        return float(np.sqrt(np.clip(a, 0.0, None) * np.clip(b, 0.0, None)).sum())
    return linalg.root_fidelity(a, b)


def state_entropy(a: np.ndarray) -> float:
    """Entropy in bits of a conditional state (diagonal or dense)."""
    if a.ndim == 1:
        return linalg.shannon_entropy(np.clip(a, 0.0, None))
    return linalg.shannon_entropy(np.clip(np.linalg.eigvalsh(linalg.require_hermitian(a)), 0.0, None))


def _state_violations(a: np.ndarray, label: str) -> list[str]:
    if a.ndim == 1:
        out = []
        if float(a.real.min()) < linalg.EIGENVALUE_FLOOR:
            out.append(f"{label}: negative diagonal entry {a.real.min():.3e}")
        if abs(float(a.real.sum()) - 1.0) > linalg.TRACE_ATOL:
            out.append(f"{label}: diagonal sums to {a.real.sum()!r}, not 1")
        return out
    return [f"{label}: {p}" for p in linalg.density_operator_violations(a)]


class BinaryCQChannel:
    """Immutable weighted-branch representation of a binary-input channel.

    Parameters
    ----------
    weights : (B,) array of branch probabilities summing to 1.
    states0, states1 : (B, d, d) dense or (B, d) diagonal conditional states;
        ``states0[c]`` is the output for input 0 on branch ``c``.
    validate_states : run the full positive-semidefinite check on every
        branch state. Constructors that accept external data always validate;
        internal channel transforms produce valid states by construction and
        skip the (eigenvalue) check for speed.
    """

    __slots__ = ("weights", "states0", "states1")

    def __init__(self, weights, states0, states1, validate_states: bool = True):
        weights = np.asarray(weights, dtype=float)
        states0 = np.asarray(states0)
        states1 = np.asarray(states1)
        if weights.ndim != 1 or weights.size == 0:
            raise ValueError("weights must be a nonempty 1-D array")
        if states0.shape != states1.shape or states0.shape[0] != weights.size:
            raise ValueError("branch count mismatch between weights and states")
        if states0.ndim == 2:
            states0 = states0.astype(float)
            states1 = states1.astype(float)
        elif states0.ndim == 3:
            if states0.shape[1] != states0.shape[2]:
                raise ValueError("dense states must be square matrices")
            if np.iscomplexobj(states0) or np.iscomplexobj(states1):
                states0 = states0.astype(complex)
                states1 = states1.astype(complex)
            else:
                states0 = states0.astype(float)
                states1 = states1.astype(float)
        else:
            raise ValueError("states must have shape (B, d) or (B, d, d)")
        if weights.min() < -WEIGHT_ATOL:
            raise ValueError(f"negative branch weight {weights.min()!r}")
        if abs(weights.sum() - 1.0) > WEIGHT_ATOL:
            raise ValueError(f"branch weights sum to {weights.sum()!r}, not 1")
        if validate_states:
            problems = []
            for c in range(weights.size):
                problems += _state_violations(states0[c], f"sigma0[{c}]")
                problems += _state_violations(states1[c], f"sigma1[{c}]")
            if problems:
                raise ValueError("invalid channel: " + "; ".join(problems))
        for arr in (weights, states0, states1):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "states0", states0)
        object.__setattr__(self, "states1", states1)

    def __setattr__(self, name, value):
        raise AttributeError("BinaryCQChannel is immutable")

    @property
    def branch_count(self) -> int:
        return self.weights.size

    @property
    def quantum_dim(self) -> int:
        return self.states0.shape[1]

    @property
    def is_diagonal(self) -> bool:
        return self.states0.ndim == 2

    def densified(self) -> "BinaryCQChannel":
        """Dense-matrix copy (diagonal vectors become diagonal matrices)."""
        if not self.is_diagonal:
            return self
        s0 = np.stack([np.diag(row) for row in self.states0])
        s1 = np.stack([np.diag(row) for row in self.states1])
        return BinaryCQChannel(self.weights, s0, s1, validate_states=False)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_states(cls, rho0, rho1) -> "BinaryCQChannel":
        """Base channel u -> rho_u from two density matrices (one branch)."""
        rho0 = linalg.require_density_operator(rho0)
        rho1 = linalg.require_density_operator(rho1)
        if rho0.shape != rho1.shape:
            raise ValueError("rho0 and rho1 must have equal dimension")
        return cls([1.0], rho0[None], rho1[None])

    @classmethod
    def classical(cls, row0, row1) -> "BinaryCQChannel":
        """Embed a classical binary-input channel with transition rows.

        ``row_u[y]`` is the probability of output ``y`` given input ``u``;
        the outputs become commuting diagonal states, so the channel's root
        fidelity is the classical Bhattacharyya overlap of the two rows.
        """
        row0 = np.asarray(row0, dtype=float)
        row1 = np.asarray(row1, dtype=float)
        if row0.shape != row1.shape or row0.ndim != 1:
            raise ValueError("transition rows must be equal-length vectors")
        for name, row in (("row0", row0), ("row1", row1)):
            if row.min() < -WEIGHT_ATOL:
                raise ValueError(f"{name} has negative probability {row.min()!r}")
            if abs(row.sum() - 1.0) > WEIGHT_ATOL:
                raise ValueError(f"{name} sums to {row.sum()!r}, not 1")
        return cls([1.0], row0[None], row1[None])

    @classmethod
    def pure_overlap(cls, overlap: float) -> "BinaryCQChannel":
        """Channel with pure-state outputs |psi0>, |psi1> of real overlap.

        Any binary pure-state channel is unitarily equivalent to this 2-dim
        form, and unitaries change neither the rate nor the reliability.
        """
        if not -1.0 <= overlap <= 1.0:
            raise ValueError(f"overlap {overlap!r} outside [-1, 1]")
        psi0 = np.array([1.0, 0.0])
        psi1 = np.array([overlap, math.sqrt(max(0.0, 1.0 - overlap ** 2))])
        return cls.from_states(np.outer(psi0, psi0), np.outer(psi1, psi1))

    @classmethod
    def bsc(cls, p: float) -> "BinaryCQChannel":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"crossover probability {p!r} outside [0, 1]")
        return cls.classical([1.0 - p, p], [p, 1.0 - p])

    @classmethod
    def bec(cls, eps: float) -> "BinaryCQChannel":
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"erasure probability {eps!r} outside [0, 1]")
        return cls.classical([1.0 - eps, eps, 0.0], [0.0, eps, 1.0 - eps])

    @classmethod
    def bpsk(cls, alpha: float) -> "BinaryCQChannel":
        """Coherent-state alphabet |alpha>, |-alpha>: overlap exp(-2 alpha^2)."""
        return cls.pure_overlap(math.exp(-2.0 * alpha ** 2))


def make_classical(transition_rows) -> BinaryCQChannel:
    rows = np.asarray(transition_rows, dtype=float)
    if rows.shape[0] != 2:
        raise ValueError("expected exactly two transition rows")
    return BinaryCQChannel.classical(rows[0], rows[1])


def make_pure_overlap(overlap: float) -> BinaryCQChannel:
    return BinaryCQChannel.pure_overlap(overlap)


# -- channel parameters ----------------------------------------------------

def _dense_root_fidelities(states0: np.ndarray, states1: np.ndarray) -> np.ndarray:
    """Per-branch Tr sqrt(sqrt(a) b sqrt(a)), with the eigensolver batched."""
    count, dim = states0.shape[0], states0.shape[1]
    chunk = max(1, (48 << 20) // max(dim * dim * states0.itemsize * 3, 1))
    out = np.empty(count)
    for start in range(0, count, chunk):
        a = states0[start:start + chunk]
        b = states1[start:start + chunk]
        eigs, vecs = np.linalg.eigh(a)
        roots = np.sqrt(np.clip(eigs, 0.0, None))
        ra = (vecs * roots[:, None, :]) @ vecs.conj().transpose(0, 2, 1)
        inner = ra @ b @ ra
        w = np.clip(np.linalg.eigvalsh(0.5 * (inner + inner.conj().transpose(0, 2, 1))),
                    0.0, None)
        out[start:start + chunk] = np.sqrt(w).sum(axis=1)
    return out


def root_channel_fidelity(w: BinaryCQChannel) -> float:
    """sqrt(F(W)): branch-weighted root fidelity of the conditional states."""
    if w.is_diagonal:
        return float(sum(w.weights[c] * state_root_fidelity(w.states0[c], w.states1[c])
                         for c in range(w.branch_count)))
    return float((w.weights * _dense_root_fidelities(w.states0, w.states1)).sum())


def channel_fidelity(w: BinaryCQChannel) -> float:
    """Reliability parameter F(W) in [0, 1]; 0 = perfectly distinguishable."""
    return root_channel_fidelity(w) ** 2


def _dense_entropies(mats: np.ndarray) -> np.ndarray:
    """Entropies in bits of a stack of Hermitian states, chunked to bound
    the eigensolver workspace at roughly 64 MB."""
    count, dim = mats.shape[0], mats.shape[1]
    chunk = max(1, (64 << 20) // max(dim * dim * mats.itemsize, 1))
    out = np.empty(count)
    for start in range(0, count, chunk):
        block = mats[start:start + chunk]
        eigs = np.clip(np.linalg.eigvalsh(block), 0.0, None)
        terms = np.where(eigs > linalg.ENTROPY_CUTOFF,
                         -eigs * np.log2(np.where(eigs > 0, eigs, 1.0)), 0.0)
        out[start:start + chunk] = terms.sum(axis=1)
    return out


def holevo_information(w: BinaryCQChannel) -> float:
    """Rate parameter I(W) in bits: H((rho0+rho1)/2) - H(rho0)/2 - H(rho1)/2.

    Evaluated branch by branch; the classical-register entropy terms cancel
    between the mixture and the conditionals.
    """
    if w.is_diagonal:
        total = 0.0
        for c in range(w.branch_count):
            s0, s1 = w.states0[c], w.states1[c]
            total += w.weights[c] * (state_entropy(0.5 * (s0 + s1))
                                     - 0.5 * state_entropy(s0) - 0.5 * state_entropy(s1))
        return float(total)
    h_mix = _dense_entropies(0.5 * (w.states0 + w.states1))
    h0 = _dense_entropies(w.states0)
    h1 = _dense_entropies(w.states1)
    return float((w.weights * (h_mix - 0.5 * h0 - 0.5 * h1)).sum())


def holevo_lower_bound_from_fidelity(f: float) -> float:
    """Rate floor log2(2 / (1 + sqrt(F))) implied by the fidelity."""
    if not -1e-12 <= f <= 1 + 1e-12:
        raise ValueError(f"fidelity {f!r} outside [0, 1]")
    f = min(max(f, 0.0), 1.0)
    return math.log2(2.0 / (1.0 + math.sqrt(f)))


def holevo_upper_bound_from_fidelity(f: float) -> float:
    """Rate ceiling sqrt(1 - F) implied by the fidelity."""
    if not -1e-12 <= f <= 1 + 1e-12:
        raise ValueError(f"fidelity {f!r} outside [0, 1]")
    f = min(max(f, 0.0), 1.0)
    return math.sqrt(1.0 - f)


def holevo_entropy_bound_from_fidelity(f: float) -> float:
    """Tighter rate ceiling H2((1 - sqrt(F)) / 2); at most sqrt(1 - F)."""
    if not -1e-12 <= f <= 1 + 1e-12:
        raise ValueError(f"fidelity {f!r} outside [0, 1]")
    f = min(max(f, 0.0), 1.0)
    return linalg.binary_entropy(0.5 * (1.0 - math.sqrt(f)))


PARAM_SANDWICH_ATOL = 1e-8


@dataclass(frozen=True)
class ChannelParams:
    """The (rate, reliability) pair of one channel.

    Construction checks the rate/reliability sandwich
    ``log2(2/(1+sqrt(F))) <= I <= sqrt(1-F)`` within ``PARAM_SANDWICH_ATOL``.
    """

    holevo: float
    fidelity: float

    def __post_init__(self):
        if not -1e-9 <= self.fidelity <= 1 + 1e-9:
            raise ValueError(f"fidelity {self.fidelity!r} outside [0, 1]")
        lo = holevo_lower_bound_from_fidelity(min(max(self.fidelity, 0.0), 1.0))
        hi = holevo_upper_bound_from_fidelity(min(max(self.fidelity, 0.0), 1.0))
        if self.holevo < lo - PARAM_SANDWICH_ATOL or self.holevo > hi + PARAM_SANDWICH_ATOL:
            raise ValueError(
                f"rate {self.holevo!r} violates the fidelity sandwich "
                f"[{lo!r}, {hi!r}] for F={self.fidelity!r}")

    @property
    def root_fidelity(self) -> float:
        return math.sqrt(max(self.fidelity, 0.0))


def channel_params(w: BinaryCQChannel) -> ChannelParams:
    return ChannelParams(holevo=holevo_information(w), fidelity=channel_fidelity(w))


# -- JSON channel-spec documents -------------------------------------------

def channel_from_spec(doc: dict) -> BinaryCQChannel:
    """Build a channel from a JSON-style spec document.

    Two forms are accepted::

        {"preset": "bsc" | "bec" | "pure_overlap" | "bpsk", "param": number}
        {"dim": d, "rho0": [[[re, im], ...], ...], "rho1": ...}

    Dense entries are row-major ``[re, im]`` pairs. All channel invariants
    are validated; the error message lists every violated one.
    """
    if not isinstance(doc, dict):
        raise ValueError("channel spec must be a JSON object")
    if "preset" in doc:
        name = doc["preset"]
        if name not in PRESET_NAMES:
            raise ValueError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")
        if "param" not in doc:
            raise ValueError(f"preset {name!r} requires a 'param' value")
        param = float(doc["param"])
        return getattr(BinaryCQChannel, name)(param)
    if "dim" in doc:
        dim = int(doc["dim"])
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        states = []
        for key in ("rho0", "rho1"):
            if key not in doc:
                raise ValueError(f"dense channel spec missing {key!r}")
            arr = np.asarray(doc[key], dtype=float)
            if arr.shape != (dim, dim, 2):
                raise ValueError(f"{key} must be a {dim}x{dim} matrix of [re, im] pairs, "
                                 f"got shape {arr.shape}")
            states.append(arr[..., 0] + 1j * arr[..., 1])
        problems = [f"{k}: {p}" for k, s in zip(("rho0", "rho1"), states)
                    for p in linalg.density_operator_violations(s)]
        if problems:
            raise ValueError("invalid channel spec: " + "; ".join(problems))
        return BinaryCQChannel.from_states(states[0], states[1])
    raise ValueError("channel spec needs either a 'preset' or a 'dim' entry")


def load_channel(path: str) -> BinaryCQChannel:
    with open(path, "r", encoding="utf-8") as fh:
        return channel_from_spec(json.load(fh))
