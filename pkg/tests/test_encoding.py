import itertools

import numpy as np
import pytest

from cqpolar.encoding import (CodeSpec, bit_reversal_permutation, coset_encode,
                              encode, encode_many, generator_matrix)

import oracles


def test_encode_two_bits():
    for u1, u2 in itertools.product((0, 1), repeat=2):
        np.testing.assert_array_equal(encode(np.array([u1, u2])),
                                      [u1 ^ u2, u2])


def test_encode_reference_rows():
    np.testing.assert_array_equal(encode(np.array([0, 0, 0, 1])), [1, 1, 1, 1])
    np.testing.assert_array_equal(encode(np.array([1, 1, 0, 0])), [0, 0, 1, 0])


def test_generator_matrix_n4():
    expected = np.array([[1, 0, 0, 0],
                         [1, 0, 1, 0],
                         [1, 1, 0, 0],
                         [1, 1, 1, 1]], dtype=np.uint8)
    np.testing.assert_array_equal(generator_matrix(4), expected)


def test_generator_matrix_n2_is_kernel():
    np.testing.assert_array_equal(generator_matrix(2), [[1, 0], [1, 1]])


def test_generator_self_inverse_n8():
    g = generator_matrix(8).astype(np.int64)
    np.testing.assert_array_equal((g @ g) % 2, np.eye(8, dtype=np.int64))


def test_bit_reversal_examples():
    np.testing.assert_array_equal(bit_reversal_permutation(2), [0, 1])
    np.testing.assert_array_equal(bit_reversal_permutation(4), [0, 2, 1, 3])
    np.testing.assert_array_equal(bit_reversal_permutation(8), [0, 4, 2, 6, 1, 5, 3, 7])


def test_bit_reversal_is_involution():
    for block in (16, 64, 256):
        perm = bit_reversal_permutation(block)
        np.testing.assert_array_equal(perm[perm], np.arange(block))


def test_encode_matches_matrix_exhaustively():
    for n in (1, 2, 3):
        block = 1 << n
        for bits in itertools.product((0, 1), repeat=block):
            u = np.array(bits, dtype=np.uint8)
            np.testing.assert_array_equal(encode(u), oracles.encode_gf2(u))


def test_encode_matches_matrix_randomized():
    rng = np.random.default_rng(0)
    for block in (16, 32, 64):
        for _ in range(25):
            u = rng.integers(0, 2, size=block).astype(np.uint8)
            np.testing.assert_array_equal(encode(u), oracles.encode_gf2(u))


def test_encode_linearity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        u = rng.integers(0, 2, size=32).astype(np.uint8)
        v = rng.integers(0, 2, size=32).astype(np.uint8)
        np.testing.assert_array_equal(encode(u ^ v), encode(u) ^ encode(v))


def test_encode_many_matches_single():
    rng = np.random.default_rng(2)
    batch = rng.integers(0, 2, size=(10, 16)).astype(np.uint8)
    out = encode_many(batch)
    for row_in, row_out in zip(batch, out):
        np.testing.assert_array_equal(encode(row_in), row_out)


def test_encode_rejects_bad_lengths():
    with pytest.raises(ValueError):
        encode(np.array([0, 1, 0]))
    with pytest.raises(ValueError):
        generator_matrix(8192)


def test_code_spec_validation():
    spec = CodeSpec(4, (3, 4), {1: 0, 2: 0})
    assert spec.info_count == 2
    np.testing.assert_array_equal(spec.info_mask(), [False, False, True, True])
    with pytest.raises(ValueError, match="complement"):
        CodeSpec(4, (3, 4), {1: 0})
    with pytest.raises(ValueError, match="0 or 1"):
        CodeSpec(2, (2,), {1: 2})


def test_code_spec_json_roundtrip():
    spec = CodeSpec(8, (4, 6, 7, 8), {1: 0, 2: 1, 3: 0, 5: 1})
    again = CodeSpec.from_json(spec.to_json())
    assert again == spec
    assert '"n": 3' in spec.to_json()


def test_coset_encode_full_rate_equals_encode():
    spec = CodeSpec(4, (1, 2, 3, 4), {})
    rng = np.random.default_rng(3)
    u = rng.integers(0, 2, size=4).astype(np.uint8)
    np.testing.assert_array_equal(coset_encode(spec, u), encode(u))


def test_coset_encode_rate_zero_is_constant():
    spec = CodeSpec(4, (), {1: 1, 2: 0, 3: 1, 4: 0})
    word = coset_encode(spec, np.array([], dtype=np.uint8))
    np.testing.assert_array_equal(word, oracles.encode_gf2([1, 0, 1, 0]))


def test_coset_encode_single_info_bit():
    spec = CodeSpec(4, (4,), {1: 0, 2: 0, 3: 0})
    np.testing.assert_array_equal(coset_encode(spec, [1]), [1, 1, 1, 1])


def test_coset_encode_matches_submatrix_formula():
    rng = np.random.default_rng(4)
    for block in (8, 16, 64):
        gen = oracles.gf2_generator_matrix(block)
        positions = rng.permutation(block)
        info = tuple(sorted(int(i) + 1 for i in positions[: block // 2]))
        frozen = {int(i) + 1: int(rng.integers(0, 2)) for i in positions[block // 2:]}
        spec = CodeSpec(block, info, frozen)
        bits = rng.integers(0, 2, size=block // 2).astype(np.uint8)
        info_rows = gen[[i - 1 for i in info]]
        frozen_rows = gen[[i - 1 for i in sorted(frozen)]]
        frozen_bits = np.array([frozen[i] for i in sorted(frozen)], dtype=np.int64)
        expected = (bits.astype(np.int64) @ info_rows + frozen_bits @ frozen_rows) % 2
        np.testing.assert_array_equal(coset_encode(spec, bits), expected)
