"""Exact synthesis of the polarized channels.

One polarization step turns two copies of a channel W into a worse/better
pair (W-, W+): the minus channel sees the XOR of two inputs with the partner
bit unknown, the plus channel sees its input with the partner bit revealed as
an extra classical register. Applying the steps along the binary expansion of
i-1 (most significant bit first, 0 = minus, 1 = plus) synthesizes the i-th
split channel at block length 2^n.

Both transforms square the quantum dimension and multiply branch counts, so
everything here is gated by a :class:`~cqpolar.budget.Budget`; a
:class:`~cqpolar.budget.BudgetExceeded` signal tells callers to fall back to
interval bound propagation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .budget import Budget, BudgetExceeded
from .channel import (BinaryCQChannel, ChannelParams, _dense_entropies,
                      channel_params, holevo_information, root_channel_fidelity,
                      state_entropy)
from .encoding import encode_many

# Branches whose conditional-state pairs differ by less than this Frobenius
# distance are merged (their decomposed contributions are identical).
MERGE_ATOL = 1e-10
_SIGNATURE_DECIMALS = 9


def _branch_signatures(states0, states1) -> np.ndarray:
    """Cheap per-branch invariants used to pre-group merge candidates."""
    if states0.ndim == 2:
        m00 = np.einsum("bi,bi->b", states0, states0)
        m11 = np.einsum("bi,bi->b", states1, states1)
        m01 = np.einsum("bi,bi->b", states0, states1)
    else:
        m00 = np.einsum("bij,bij->b", states0.conj(), states0).real
        m11 = np.einsum("bij,bij->b", states1.conj(), states1).real
        m01 = np.einsum("bij,bij->b", states0.conj(), states1).real
    return np.round(np.stack([m00, m11, m01], axis=1), _SIGNATURE_DECIMALS)


def _merge_branches(weights, states0, states1):
    """Sum weights of branches carrying the same conditional-state pair."""
    signatures = _branch_signatures(states0, states1)
    groups: dict[bytes, list[int]] = {}
    kept: list[int] = []
    out_weights: list[float] = []
    for b in range(len(weights)):
        key = signatures[b].tobytes()
        merged = False
        for pos in groups.get(key, ()):
            r = kept[pos]
            if (np.linalg.norm(states0[b] - states0[r]) < MERGE_ATOL
                    and np.linalg.norm(states1[b] - states1[r]) < MERGE_ATOL):
                out_weights[pos] += weights[b]
                merged = True
                break
        if not merged:
            groups.setdefault(key, []).append(len(kept))
            kept.append(b)
            out_weights.append(weights[b])
    return (np.asarray(out_weights), states0[kept], states1[kept])


def _deduplicated(w: BinaryCQChannel):
    """Branch ensemble with exact-duplicate branches merged.

    Runs at the *input* dimension, where the state comparisons are cheap;
    duplicate output branches of a transform always come from duplicate
    input branches (tensoring preserves the Frobenius closeness), so merging
    here keeps the branch growth polynomial for symmetric channels without
    touching the squared-dimension output states.
    """
    if w.branch_count == 1:
        return w.weights, w.states0, w.states1
    return _merge_branches(w.weights, w.states0, w.states1)


def _check_transform_budget(w: BinaryCQChannel, new_branches: int, budget: Budget) -> None:
    budget.check_dim(w.quantum_dim ** 2, w.is_diagonal)
    budget.check_branches(new_branches)


def _paired_kron_mix(a0, a1, b0, b1, out) -> None:
    """out = (a0 (x) b0 + a1 (x) b1) / 2 without growing temporaries."""
    np.multiply(np.kron(a0, b0), 0.5, out=out)
    out += 0.5 * np.kron(a1, b1)


def transform_minus(w: BinaryCQChannel, budget: Budget | None = None) -> BinaryCQChannel:
    """Worse channel of one polarization step.

    The output for input u1 averages over the unknown partner bit u2:
    ``sigma-_(c,c')(u1) = 1/2 sum_u2 sigma_c(u2 xor u1) (x) sigma_c'(u2)``
    on branch pairs (c, c') with weight w(c) w(c'). The quantum dimension
    squares; no classical register is added.
    """
    budget = budget if budget is not None else Budget.from_env()
    cw, cs0, cs1 = _deduplicated(w)
    count = cw.size
    _check_transform_budget(w, count ** 2, budget)
    shape = (count * count,) + tuple(d * d for d in w.states0.shape[1:])
    dtype = w.states0.dtype
    out0 = np.empty(shape, dtype=dtype)
    out1 = np.empty(shape, dtype=dtype)
    weights = np.outer(cw, cw).ravel()
    k = 0
    for c in range(count):
        a0, a1 = cs0[c], cs1[c]
        for cp in range(count):
            b0, b1 = cs0[cp], cs1[cp]
            _paired_kron_mix(a0, a1, b0, b1, out0[k])
            _paired_kron_mix(a1, a0, b0, b1, out1[k])
            k += 1
    if w.is_diagonal:
        weights, out0, out1 = _merge_branches(weights, out0, out1)
    return BinaryCQChannel(weights, out0, out1, validate_states=False)


def transform_plus(w: BinaryCQChannel, budget: Budget | None = None) -> BinaryCQChannel:
    """Better channel of one polarization step.

    The revealed partner bit u1 becomes a classical register, i.e. a branch
    label (c, c', u1) with weight w(c) w(c') / 2 and conditional states
    ``sigma+(u2) = sigma_c(u2 xor u1) (x) sigma_c'(u2)``. It never enters
    the quantum dimension.
    """
    budget = budget if budget is not None else Budget.from_env()
    cw, cs0, cs1 = _deduplicated(w)
    count = cw.size
    _check_transform_budget(w, 2 * count ** 2, budget)
    shape = (2 * count * count,) + tuple(d * d for d in w.states0.shape[1:])
    dtype = w.states0.dtype
    out0 = np.empty(shape, dtype=dtype)
    out1 = np.empty(shape, dtype=dtype)
    weights = np.repeat(0.5 * np.outer(cw, cw).ravel(), 2)
    k = 0
    for c in range(count):
        a0, a1 = cs0[c], cs1[c]
        for cp in range(count):
            b0, b1 = cs0[cp], cs1[cp]
            # u1 = 0: partner agrees with u2
            out0[k] = np.kron(a0, b0)
            out1[k] = np.kron(a1, b1)
            # u1 = 1: partner is flipped
            out0[k + 1] = np.kron(a1, b0)
            out1[k + 1] = np.kron(a0, b1)
            k += 2
    if w.is_diagonal:
        weights, out0, out1 = _merge_branches(weights, out0, out1)
    return BinaryCQChannel(weights, out0, out1, validate_states=False)


@dataclass(frozen=True)
class SplitChannelIndex:
    """Position (n, i) in the synthesis tree, i in 1..2^n.

    The binary expansion of i-1 (most significant bit first) spells the
    transform sequence: 0 applies minus, 1 applies plus, first bit first.
    """

    n: int
    i: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"level must be nonnegative, got {self.n}")
        if not 1 <= self.i <= (1 << self.n):
            raise ValueError(f"index {self.i} outside 1..{1 << self.n}")

    @property
    def expansion(self) -> tuple[int, ...]:
        return tuple((self.i - 1) >> (self.n - 1 - k) & 1 for k in range(self.n))

    @classmethod
    def from_expansion(cls, bits) -> "SplitChannelIndex":
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("expansion bits must be 0 or 1")
        index = 0
        for b in bits:
            index = (index << 1) | b
        return cls(n=len(bits), i=index + 1)


def split_channel(base: BinaryCQChannel, idx: SplitChannelIndex,
                  budget: Budget | None = None) -> BinaryCQChannel:
    """Synthesize the i-th split channel by walking the expansion of i-1."""
    budget = budget if budget is not None else Budget.from_env()
    ch = base
    for bit in idx.expansion:
        ch = transform_plus(ch, budget) if bit else transform_minus(ch, budget)
    return ch


def split_params(base: BinaryCQChannel, n: int,
                 budget: Budget | None = None) -> list[ChannelParams]:
    """Rate/reliability of every split channel at level n, in index order.

    Walks the synthesis tree depth first so sibling channels share their
    common prefix instead of being rebuilt per index.
    """
    if n < 0:
        raise ValueError(f"level must be nonnegative, got {n}")
    budget = budget if budget is not None else Budget.from_env()

    def descend(ch: BinaryCQChannel, levels_left: int) -> list[ChannelParams]:
        if levels_left == 0:
            return [channel_params(ch)]
        out = descend(transform_minus(ch, budget), levels_left - 1)
        out += descend(transform_plus(ch, budget), levels_left - 1)
        return out

    return descend(base, n)


def _leaf_pair_rates(parent: BinaryCQChannel, budget: Budget) -> tuple[float, float]:
    """Rates of (parent minus, parent plus) without materializing them.

    For each parent branch pair, the minus conditionals equal the plus
    branch mixtures (the same two-term tensor mixtures M0, M1), and the plus
    conditionals are plain tensor products whose spectra combine exactly
    from the parents'. So three full-dimension spectra per pair cover both
    children. The minus channel's input-averaged state (M0 + M1)/2 is still
    evaluated numerically at the full dimension, which keeps the rate
    conservation identity a nontrivial check of the construction.
    """
    cw, cs0, cs1 = _deduplicated(parent)
    count = cw.size
    _check_transform_budget(parent, 2 * count ** 2, budget)
    h0 = _dense_entropies(cs0)
    h1 = _dense_entropies(cs1)
    minus_rate = 0.0
    plus_rate = 0.0
    dim2 = parent.quantum_dim ** 2
    stack = np.empty((3, dim2, dim2), dtype=parent.states0.dtype)
    for c in range(count):
        a0, a1 = cs0[c], cs1[c]
        for cp in range(count):
            b0, b1 = cs0[cp], cs1[cp]
            _paired_kron_mix(a0, a1, b0, b1, stack[0])
            _paired_kron_mix(a1, a0, b0, b1, stack[1])
            np.add(stack[0], stack[1], out=stack[2])
            stack[2] *= 0.5
            h_m0, h_m1, h_mix = _dense_entropies(stack)
            ww = cw[c] * cw[cp]
            minus_rate += ww * (h_mix - 0.5 * h_m0 - 0.5 * h_m1)
            plus_rate += ww * 0.5 * (h_m0 + h_m1 - (h0[c] + h1[c] + h0[cp] + h1[cp]))
    return minus_rate, plus_rate


def split_rates(base: BinaryCQChannel, n: int,
                budget: Budget | None = None) -> list[float]:
    """Rates I(W_N^(i)) only, skipping the costlier fidelity evaluation.

    Agrees with the rates from :func:`split_params` to machine precision;
    the dense last level is priced through :func:`_leaf_pair_rates`.
    """
    if n < 0:
        raise ValueError(f"level must be nonnegative, got {n}")
    budget = budget if budget is not None else Budget.from_env()

    def descend(ch: BinaryCQChannel, levels_left: int) -> list[float]:
        if levels_left == 0:
            return [holevo_information(ch)]
        if levels_left == 1 and not ch.is_diagonal:
            return list(_leaf_pair_rates(ch, budget))
        out = descend(transform_minus(ch, budget), levels_left - 1)
        out += descend(transform_plus(ch, budget), levels_left - 1)
        return out

    return descend(base, n)


def split_root_fidelities(base: BinaryCQChannel, n: int,
                          budget: Budget | None = None) -> list[float]:
    """sqrt(F(W_N^(i))) for every index, skipping the rate evaluation."""
    if n < 0:
        raise ValueError(f"level must be nonnegative, got {n}")
    budget = budget if budget is not None else Budget.from_env()

    def descend(ch: BinaryCQChannel, levels_left: int) -> list[float]:
        if levels_left == 0:
            return [root_channel_fidelity(ch)]
        out = descend(transform_minus(ch, budget), levels_left - 1)
        out += descend(transform_plus(ch, budget), levels_left - 1)
        return out

    return descend(base, n)


# -- Gram-matrix backend for pure-state base channels -----------------------

@dataclass(frozen=True)
class PureStateEnsemble:
    """Uniform-weight mixture of (possibly non-orthogonal) unit vectors,
    represented only through their pairwise inner products.

    The spectrum of the mixture equals the spectrum of
    ``diag(sqrt(w)) G diag(sqrt(w))``, so entropies never need the vectors
    themselves.
    """

    weights: np.ndarray
    overlap_gram: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        g = np.asarray(self.overlap_gram)
        if w.ndim != 1 or g.shape != (w.size, w.size):
            raise ValueError("weights must be (m,) and overlap_gram (m, m)")
        if abs(w.sum() - 1.0) > 1e-10 or w.min() < -1e-12:
            raise ValueError("weights must be a probability vector")
        if np.max(np.abs(g - g.conj().T)) > 1e-9:
            raise ValueError("overlap Gram matrix must be Hermitian")
        if np.max(np.abs(np.diagonal(g) - 1.0)) > 1e-9:
            raise ValueError("overlap Gram matrix must have unit diagonal")
        if np.linalg.eigvalsh(0.5 * (g + g.conj().T))[0] < -1e-9:
            raise ValueError("overlap Gram matrix must be positive semidefinite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "overlap_gram", 0.5 * (g + g.conj().T))

    def spectrum(self) -> np.ndarray:
        rw = np.sqrt(self.weights)
        m = rw[:, None] * self.overlap_gram * rw[None, :]
        return np.clip(np.linalg.eigvalsh(m), 0.0, None)

    def entropy(self) -> float:
        return linalg.shannon_entropy(self.spectrum())


def _reduce_through_gram(gram: np.ndarray, weight_rows) -> list[np.ndarray]:
    """Map mixtures sharing one Gram matrix to dense operators on the span.

    Any factorization G = X† X gives an isometry onto the span of the
    vectors; each mixture with weight vector w becomes X diag(w) X†, and all
    spectra and fidelities are preserved.
    """
    evals, evecs = np.linalg.eigh(0.5 * (gram + gram.conj().T))
    keep = evals > 1e-12 * max(evals[-1], 1.0)
    x = (evecs[:, keep] * np.sqrt(evals[keep])).conj().T
    return [x @ (np.asarray(w)[:, None] * x.conj().T) for w in weight_rows]


def gram_split_params(overlap: float, n: int, indices=None,
                      budget: Budget | None = None) -> dict[int, ChannelParams]:
    """Split-channel parameters for a pure-state base channel, via Gram
    matrices of the product vectors instead of dense d^N operators.

    For index i, the averaged output states are uniform mixtures of 2^(N-i)
    product vectors whose pairwise overlaps are ``overlap**hamming``; the
    mixture pair is the same for every earlier-bits value (a fixed XOR offset
    of all codewords preserves pairwise Hamming distances), so a single Gram
    matrix of side 2^(N-i+1) suffices per index.
    """
    if not -1.0 <= overlap <= 1.0:
        raise ValueError(f"overlap {overlap!r} outside [-1, 1]")
    if n < 1:
        raise ValueError(f"level must be at least 1, got {n}")
    budget = budget if budget is not None else Budget.from_env()
    block = 1 << n
    if indices is None:
        indices = range(1, block + 1)
    out: dict[int, ChannelParams] = {}
    for i in indices:
        SplitChannelIndex(n, i)  # bounds check
        m = 1 << (block - i)
        if 2 * m > budget.max_dense_dim:
            raise BudgetExceeded("Gram matrix side", 2 * m, budget.max_dense_dim)
        futures = ((np.arange(m)[:, None] >> np.arange(block - i)[None, ::-1]) & 1).astype(np.uint8)
        u = np.zeros((2 * m, block), dtype=np.uint8)
        u[m:, i - 1] = 1
        if block - i:
            u[:m, i:] = futures
            u[m:, i:] = futures
        codewords = encode_many(u).astype(np.int32)
        wt = codewords.sum(axis=1)
        hamming = wt[:, None] + wt[None, :] - 2 * (codewords @ codewords.T)
        gram = np.power(float(overlap), hamming)
        w0 = np.concatenate([np.full(m, 1.0 / m), np.zeros(m)])
        w1 = np.concatenate([np.zeros(m), np.full(m, 1.0 / m)])
        a0, a1 = _reduce_through_gram(gram, [w0, w1])
        holevo = (state_entropy(0.5 * (a0 + a1))
                  - 0.5 * state_entropy(a0) - 0.5 * state_entropy(a1))
        out[i] = ChannelParams(holevo=holevo, fidelity=linalg.root_fidelity(a0, a1) ** 2)
    return out
