"""Linear polar encoding x = u G over GF(2), with G = B F^(x)n.

``B`` is the bit-reversal permutation and ``F = [[1, 0], [1, 1]]`` the 2x2
kernel. Bit vectors are plain uint8 numpy arrays. User-facing bit indices
are 1-based (matching u_1 ... u_N); array positions are 0-based internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

GENERATOR_MATRIX_CAP = 4096


def _require_power_of_two(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"block length must be a power of two, got {n}")
    return int(n).bit_length() - 1


def bit_reversal_permutation(block_length: int) -> np.ndarray:
    """Index permutation reversing the n-bit binary expansion (an involution)."""
    _require_power_of_two(block_length)
    perm = np.zeros(1, dtype=np.int64)
    while perm.size < block_length:
        perm = np.concatenate([2 * perm, 2 * perm + 1])
    return perm


def encode(u) -> np.ndarray:
    """Encode one block: apply the bit-reversal, then the kernel butterflies.

    Runs in O(N log N) bit operations via one in-place xor pass per level.
    """
    u = np.asarray(u)
    n = _require_power_of_two(u.shape[-1])
    if u.ndim != 1:
        raise ValueError("encode expects a single bit vector; use encode_many for batches")
    x = u[bit_reversal_permutation(u.size)].astype(np.uint8)
    for level in range(n):
        view = x.reshape(1 << level, 2, -1)
        view[:, 0, :] ^= view[:, 1, :]
    return x


def encode_many(u) -> np.ndarray:
    """Encode a batch of rows at once; each row as in :func:`encode`."""
    u = np.asarray(u)
    if u.ndim != 2:
        raise ValueError(f"expected a (batch, N) bit array, got shape {u.shape}")
    n = _require_power_of_two(u.shape[1])
    x = u[:, bit_reversal_permutation(u.shape[1])].astype(np.uint8)
    for level in range(n):
        view = x.reshape(u.shape[0], 1 << level, 2, -1)
        view[:, :, 0, :] ^= view[:, :, 1, :]
    return x.reshape(u.shape)


def generator_matrix(block_length: int) -> np.ndarray:
    """Explicit N x N generator matrix; row i is encode(e_i)."""
    _require_power_of_two(block_length)
    if block_length > GENERATOR_MATRIX_CAP:
        raise ValueError(f"explicit generator matrix capped at N = {GENERATOR_MATRIX_CAP}")
    return encode_many(np.eye(block_length, dtype=np.uint8))


@dataclass(frozen=True)
class CodeSpec:
    """Coset-code parameters (N, K, A, frozen bits).

    ``info_set`` holds the 1-based information positions; ``frozen_bits``
    maps each remaining 1-based position to its fixed bit value.
    """

    block_length: int
    info_set: tuple[int, ...]
    frozen_bits: dict[int, int]

    def __post_init__(self):
        _require_power_of_two(self.block_length)
        info = tuple(sorted(self.info_set))
        object.__setattr__(self, "info_set", info)
        if len(set(info)) != len(info):
            raise ValueError("info_set contains duplicates")
        if info and (info[0] < 1 or info[-1] > self.block_length):
            raise ValueError("info_set indices must lie in 1..N")
        expected_frozen = set(range(1, self.block_length + 1)) - set(info)
        if set(self.frozen_bits) != expected_frozen:
            raise ValueError("frozen_bits must cover exactly the complement of info_set")
        for idx, bit in self.frozen_bits.items():
            if bit not in (0, 1):
                raise ValueError(f"frozen bit at {idx} must be 0 or 1, got {bit!r}")

    @property
    def info_count(self) -> int:
        return len(self.info_set)

    def info_mask(self) -> np.ndarray:
        """Boolean mask over 0-based positions, True at information bits."""
        mask = np.zeros(self.block_length, dtype=bool)
        mask[np.array(self.info_set, dtype=int) - 1] = True
        return mask

    def frozen_vector(self) -> np.ndarray:
        """Length-N uint8 vector with frozen values filled, zeros elsewhere."""
        u = np.zeros(self.block_length, dtype=np.uint8)
        for idx, bit in self.frozen_bits.items():
            u[idx - 1] = bit
        return u

    def assemble(self, info_bits) -> np.ndarray:
        """Full input block u with info bits placed on A and frozen bits on A^c."""
        info_bits = np.asarray(info_bits, dtype=np.uint8)
        if info_bits.shape != (self.info_count,):
            raise ValueError(f"expected {self.info_count} information bits, "
                             f"got shape {info_bits.shape}")
        u = self.frozen_vector()
        u[self.info_mask()] = info_bits
        return u

    def to_json(self) -> str:
        doc = {
            "schema": "cqpolar.code-spec/1",
            "n": _require_power_of_two(self.block_length),
            "K": self.info_count,
            "info_set": list(self.info_set),
            "frozen_bits": {str(i): int(b) for i, b in sorted(self.frozen_bits.items())},
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CodeSpec":
        doc = json.loads(text)
        block_length = 1 << int(doc["n"])
        info_set = tuple(int(i) for i in doc["info_set"])
        frozen = {int(i): int(b) for i, b in doc["frozen_bits"].items()}
        spec = cls(block_length, info_set, frozen)
        if spec.info_count != int(doc["K"]):
            raise ValueError("K disagrees with info_set length")
        return spec


def coset_encode(spec: CodeSpec, info_bits) -> np.ndarray:
    """Codeword for the given information bits under the coset code."""
    return encode(spec.assemble(info_bits))
