"""Bit vectors, Hamming arithmetic and the shared-randomness source.

Positions exposed by this API are 1-based (``1..len``); the packed storage
underneath is 0-based numpy. That conversion happens in this module and
nowhere else.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Stream labels used to split one SharedRandomness root into independent,
# reproducible sub-streams. Alice- and Bob-side derivations with the same
# label sequence see identical bits.
STREAM_PADS = 1
STREAM_ORACLE = 2
STREAM_INSTANCE = 3
STREAM_INDEX = 4
STREAM_SHADOW = 5


class DimensionError(ValueError):
    """Operands have incompatible lengths."""


class InconsistentInputsError(ValueError):
    """Numeric inputs could not have come from real bit strings."""


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return (x ^ (x >> 31)) & MASK64


@dataclass(frozen=True, eq=False)
class BitVector:
    """Immutable 0/1 sequence with 1-based accessors."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if arr.size and int(arr.max()) > 1:
            raise ValueError("bits must be 0/1 valued")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @staticmethod
    def zeros(length: int) -> "BitVector":
        return BitVector(np.zeros(length, dtype=np.uint8))

    @staticmethod
    def from_bits(seq) -> "BitVector":
        return BitVector(np.asarray(list(seq), dtype=np.uint8))

    @staticmethod
    def from_int(value: int, length: int) -> "BitVector":
        """Unpack ``length`` bits of ``value``, bit k+1 taken from 2**k."""
        if value < 0:
            raise ValueError("value must be nonnegative")
        if value >> length:
            raise ValueError("value does not fit in the requested length")
        return BitVector(
            np.array([(value >> k) & 1 for k in range(length)], dtype=np.uint8)
        )

    def __len__(self) -> int:
        return int(self.bits.shape[0])

    def bit(self, i: int) -> int:
        """Bit at 1-based position ``i``."""
        if not 1 <= i <= len(self):
            raise IndexError(f"position {i} out of range [1, {len(self)}]")
        return int(self.bits[i - 1])

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.bits))

    def to_int(self) -> int:
        """Pack into an integer, position i mapping to 2**(i-1)."""
        if len(self) == 0:
            return 0
        packed = np.packbits(self.bits, bitorder="little").tobytes()
        return int.from_bytes(packed, "little")

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return len(self) == len(other) and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((len(self), self.bits.tobytes()))

    def __repr__(self) -> str:
        if len(self) <= 32:
            body = "".join(str(int(b)) for b in self.bits)
        else:
            body = f"len={len(self)},nnz={self.nnz}"
        return f"BitVector({body})"

    def serialize(self) -> tuple[bytes, int]:
        """Wire form: u64 little-endian bit count, then LSB-first packed bytes.

        Returns ``(payload, bit_length)`` where ``bit_length`` counts the
        64 header bits plus one bit per position (byte padding excluded).
        """
        packed = np.packbits(self.bits, bitorder="little").tobytes()
        return struct.pack("<Q", len(self)) + packed, 64 + len(self)

    @staticmethod
    def deserialize(buf: bytes, offset: int = 0) -> tuple["BitVector", int]:
        (count,) = struct.unpack_from("<Q", buf, offset)
        offset += 8
        nbytes = (count + 7) // 8
        raw = np.frombuffer(buf, dtype=np.uint8, count=nbytes, offset=offset)
        bits = np.unpackbits(raw, count=count, bitorder="little") if count else np.zeros(0, np.uint8)
        return BitVector(bits), offset + nbytes


def hamming(x: BitVector, y: BitVector) -> int:
    """Number of positions where the two vectors disagree."""
    if len(x) != len(y):
        raise DimensionError(f"length mismatch: {len(x)} != {len(y)}")
    return int(np.count_nonzero(x.bits ^ y.bits))


def inner_product(x: BitVector, y: BitVector) -> int:
    if len(x) != len(y):
        raise DimensionError(f"length mismatch: {len(x)} != {len(y)}")
    return int(np.dot(x.bits.astype(np.int64), y.bits.astype(np.int64)))


def hamming_via_identity(nnz_x: int, nnz_y: int, ip: int) -> int:
    """Distance reconstructed as nnz(x) + nnz(y) - 2*<x, y>."""
    if nnz_x < 0 or nnz_y < 0 or ip < 0:
        raise ValueError("counts and inner product must be nonnegative")
    if ip > min(nnz_x, nnz_y):
        raise InconsistentInputsError(
            f"inner product {ip} exceeds min(nnz) = {min(nnz_x, nnz_y)}"
        )
    result = nnz_x + nnz_y - 2 * ip
    if result < 0:
        raise InconsistentInputsError("reconstructed distance is negative")
    return result


@dataclass(frozen=True)
class SharedRandomness:
    """Counter-based public randomness keyed by (root_seed, stream_id).

    Derivation is stateless: the bit stream is a pure function of the key,
    so two parties (or two worker processes) deriving the same labels read
    identical bits without any coordination.
    """

    root_seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "root_seed", self.root_seed & MASK64)
        object.__setattr__(self, "stream_id", self.stream_id & MASK64)

    def substream(self, label: int) -> "SharedRandomness":
        mixed = _splitmix64((self.stream_id ^ ((label + 1) * _GOLDEN)) & MASK64)
        return SharedRandomness(self.root_seed, mixed)

    def generator(self) -> np.random.Generator:
        key = np.array([self.root_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def bits(self, count: int) -> np.ndarray:
        return self.generator().integers(0, 2, size=count, dtype=np.uint8)

    def bit_matrix(self, rows: int, cols: int) -> np.ndarray:
        return self.generator().integers(0, 2, size=(rows, cols), dtype=np.uint8)


def derive_public_strings(sr: SharedRandomness, count: int, length: int) -> list[BitVector]:
    """``count`` public random strings of ``length`` bits each.

    Deterministic in (sr, count, length); each bit is marginally uniform.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if length < 1:
        raise ValueError("length must be >= 1")
    matrix = sr.bit_matrix(count, length)
    return [BitVector(matrix[r]) for r in range(count)]


@dataclass(frozen=True)
class IndexingInstance:
    """Alice's string together with the position Bob must recover."""

    x: BitVector
    l: int

    def __post_init__(self):
        if not 1 <= self.l <= len(self.x):
            raise ValueError(f"index {self.l} out of range [1, {len(self.x)}]")
