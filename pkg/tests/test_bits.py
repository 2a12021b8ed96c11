"""Bit vectors, distance arithmetic, shared randomness."""
import numpy as np
import pytest

from gapcomm.bits import (
    BitVector,
    DimensionError,
    InconsistentInputsError,
    IndexingInstance,
    SharedRandomness,
    derive_public_strings,
    hamming,
    hamming_via_identity,
    inner_product,
)


def brute_hamming(x: BitVector, y: BitVector) -> int:
    return sum(1 for i in range(1, len(x) + 1) if x.bit(i) != y.bit(i))


class TestBitVector:
    def test_accessors_are_one_based(self):
        v = BitVector.from_bits([1, 0, 1])
        assert v.bit(1) == 1 and v.bit(2) == 0 and v.bit(3) == 1
        with pytest.raises(IndexError):
            v.bit(0)
        with pytest.raises(IndexError):
            v.bit(4)

    def test_rejects_non_binary_values(self):
        with pytest.raises(ValueError):
            BitVector(np.array([0, 2, 1], dtype=np.uint8))

    def test_nnz_bounded_by_length(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            v = BitVector(rng.integers(0, 2, size=33, dtype=np.uint8))
            assert 0 <= v.nnz <= len(v)

    def test_int_round_trip_lsb_first(self):
        v = BitVector.from_bits([1, 0, 1, 1])  # 1 + 4 + 8
        assert v.to_int() == 13
        assert BitVector.from_int(13, 4) == v
        with pytest.raises(ValueError):
            BitVector.from_int(16, 4)

    def test_serialization_layout(self):
        payload, bits = BitVector.from_bits([1, 0, 1, 1]).serialize()
        assert bits == 64 + 4
        assert payload[:8] == (4).to_bytes(8, "little")
        assert payload[8] == 0b1101

    def test_serialization_round_trip(self):
        rng = np.random.default_rng(1)
        for length in (1, 7, 8, 9, 64, 65, 1000):
            v = BitVector(rng.integers(0, 2, size=length, dtype=np.uint8))
            payload, bits = v.serialize()
            back, consumed = BitVector.deserialize(payload)
            assert back == v
            assert consumed == len(payload)
            assert 0 <= 8 * len(payload) - bits < 8


class TestHamming:
    def test_identical_strings(self):
        v = BitVector.from_bits([1, 0, 1, 1, 0])
        assert hamming(v, v) == 0

    def test_complement(self):
        assert hamming(BitVector.from_bits([0, 0, 0]), BitVector.from_bits([1, 1, 1])) == 3

    def test_hand_count(self):
        assert hamming(BitVector.from_bits([1, 0, 1]), BitVector.from_bits([1, 1, 0])) == 2

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            hamming(BitVector.from_bits([1]), BitVector.from_bits([1, 0]))

    def test_metric_properties_on_random_triples(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            n = int(rng.integers(1, 40))
            x, y, z = (
                BitVector(rng.integers(0, 2, size=n, dtype=np.uint8)) for _ in range(3)
            )
            assert hamming(x, y) == hamming(y, x)
            assert (hamming(x, y) == 0) == (x == y)
            assert hamming(x, z) <= hamming(x, y) + hamming(y, z)


class TestDistanceIdentity:
    def test_matches_hand_example(self):
        assert hamming_via_identity(2, 2, 1) == 2

    def test_zero_string_case(self):
        for k in range(5):
            assert hamming_via_identity(0, k, 0) == k

    def test_rejects_negative_inputs(self):
        with pytest.raises(ValueError):
            hamming_via_identity(-1, 2, 0)

    def test_rejects_inconsistent_inner_product(self):
        with pytest.raises(InconsistentInputsError):
            hamming_via_identity(2, 3, 4)

    def test_identity_on_random_pairs(self):
        # oracle: position-by-position brute force, no numpy
        rng = np.random.default_rng(3)
        for _ in range(10_000):
            n = int(rng.integers(1, 64))
            x = BitVector(rng.integers(0, 2, size=n, dtype=np.uint8))
            y = BitVector(rng.integers(0, 2, size=n, dtype=np.uint8))
            expected = brute_hamming(x, y)
            assert hamming_via_identity(x.nnz, y.nnz, inner_product(x, y)) == expected
            assert hamming(x, y) == expected


class TestSharedRandomness:
    def test_same_labels_give_identical_bits(self):
        a = SharedRandomness(1234).substream(7).bits(256)
        b = SharedRandomness(1234).substream(7).bits(256)
        assert np.array_equal(a, b)

    def test_derive_public_strings_deterministic(self):
        sr = SharedRandomness(99, 5)
        first = derive_public_strings(sr, 5, 8)
        second = derive_public_strings(sr, 5, 8)
        assert first == second
        assert len(first) == 5 and all(len(s) == 8 for s in first)

    def test_distinct_streams_disagree(self):
        base = SharedRandomness(314159)
        seen = set()
        for label in range(1000):
            seen.add(base.substream(label).bits(64).tobytes())
        assert len(seen) == 1000

    def test_bit_bias_is_near_half(self):
        bits = SharedRandomness(2718).bits(1_000_000)
        assert abs(bits.mean() - 0.5) < 0.01

    def test_validation_of_public_string_args(self):
        with pytest.raises(ValueError):
            derive_public_strings(SharedRandomness(1), 0, 4)
        with pytest.raises(ValueError):
            derive_public_strings(SharedRandomness(1), 4, 0)


class TestIndexingInstance:
    def test_index_bounds(self):
        x = BitVector.from_bits([1, 0, 1])
        IndexingInstance(x, 1)
        IndexingInstance(x, 3)
        with pytest.raises(ValueError):
            IndexingInstance(x, 0)
        with pytest.raises(ValueError):
            IndexingInstance(x, 4)
