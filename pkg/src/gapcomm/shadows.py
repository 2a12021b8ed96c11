"""Measure-then-estimate compression schemes and their one-way protocol adapter.

The two phases are strictly separated: a measurement algorithm turns a full
classical state description into a bitstring by simulating the quantum
measurements, and an estimation algorithm later computes observable values
from that bitstring alone. Packaging the bitstring as a one-way message
makes the scheme's compression size directly measurable.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable

import numpy as np

from .bits import STREAM_SHADOW, BitVector, SharedRandomness
from .messages import ProtocolMessage
from .pauli import ObservableError, PauliMask

MAX_SIM_QUBITS = 10

# basis letter codes packed into the shadow (2 bits per qubit per round)
LETTERS = "XYZ"
_CODE = {"X": 0, "Y": 1, "Z": 2}

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)
_SDG = np.array([[1.0, 0.0], [0.0, -1.0j]], dtype=np.complex128)
_ROTATION = {
    "X": _H,
    "Y": _H @ _SDG,
    "Z": np.eye(2, dtype=np.complex128),
}


@dataclass(frozen=True, eq=False)
class ClassicalDensityMatrix:
    """Full classical description of a mixed state, validated on construction."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("density matrix must be square")
        dim = arr.shape[0]
        if dim < 2 or (dim & (dim - 1)) != 0:
            raise ValueError("dimension must be a power of two")
        if not np.allclose(arr, arr.conj().T, atol=1e-9):
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(arr).real - 1.0) > 1e-9 or abs(np.trace(arr).imag) > 1e-9:
            raise ValueError("density matrix must have unit trace")
        if np.linalg.eigvalsh(arr).min() < -1e-9:
            raise ValueError("density matrix must be positive semidefinite")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @staticmethod
    def from_pure(amplitudes) -> "ClassicalDensityMatrix":
        psi = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        psi = psi / np.linalg.norm(psi)
        return ClassicalDensityMatrix(np.outer(psi, psi.conj()))

    @property
    def qubits(self) -> int:
        return int(self.entries.shape[0]).bit_length() - 1

    # file format: u64 qubit count, then row-major (real, imag) float64 pairs,
    # all little-endian
    def to_bytes(self) -> bytes:
        import struct

        flat = self.entries.reshape(-1)
        pairs = np.empty(2 * flat.shape[0], dtype="<f8")
        pairs[0::2] = flat.real
        pairs[1::2] = flat.imag
        return struct.pack("<Q", self.qubits) + pairs.tobytes()

    @staticmethod
    def from_bytes(buf: bytes) -> "ClassicalDensityMatrix":
        import struct

        (qubits,) = struct.unpack_from("<Q", buf, 0)
        dim = 1 << qubits
        pairs = np.frombuffer(buf, dtype="<f8", count=2 * dim * dim, offset=8)
        return ClassicalDensityMatrix((pairs[0::2] + 1j * pairs[1::2]).reshape(dim, dim))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SharedRandomness):
        return rng.substream(STREAM_SHADOW).generator()
    return rng


def born_vector(rho: ClassicalDensityMatrix, letters: str) -> np.ndarray:
    """Computational-basis outcome distribution after per-qubit basis rotation."""
    n = rho.qubits
    if len(letters) != n:
        raise ValueError(f"need {n} basis letters, got {len(letters)}")
    if n > MAX_SIM_QUBITS:
        raise ValueError(f"dense simulation capped at {MAX_SIM_QUBITS} qubits")
    for ch in letters:
        if ch not in _ROTATION:
            raise ValueError(f"invalid basis letter {ch!r}")
    # qubit t reads index bit t-1, so the last letter sits on the high factor
    unitary = reduce(np.kron, [_ROTATION[ch] for ch in reversed(letters)])
    probs = np.einsum("ij,jk,ik->i", unitary, rho.entries, unitary.conj()).real
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def simulate_measure(rho: ClassicalDensityMatrix, letters: str, rng) -> BitVector:
    """One simulated measurement round with exact outcome probabilities.

    Returns the outcome bits, qubit t at position t.
    """
    gen = _as_generator(rng)
    probs = born_vector(rho, letters)
    u = float(gen.random())
    index = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    index = min(index, probs.shape[0] - 1)
    n = rho.qubits
    return BitVector(np.array([(index >> t) & 1 for t in range(n)], dtype=np.uint8))


@dataclass(frozen=True)
class ShadowPair:
    """A measurement algorithm and an estimation algorithm.

    ``measure(rho, rng) -> BitVector`` may simulate the state at will;
    ``estimate(observable, shadow) -> float`` sees only the bitstring.
    The adapter below relies on exactly that separation.
    """

    copies: int
    measure: Callable[[ClassicalDensityMatrix, object], BitVector]
    estimate: Callable[[PauliMask, BitVector], float]


def _pack_rounds(codes: np.ndarray, outcomes: np.ndarray) -> BitVector:
    s, n = codes.shape
    round_bits = np.empty((s, 3 * n), dtype=np.uint8)
    round_bits[:, 0 : 2 * n : 2] = codes & 1
    round_bits[:, 1 : 2 * n : 2] = codes >> 1
    round_bits[:, 2 * n :] = outcomes
    return BitVector(round_bits.reshape(-1))


def _unpack_rounds(shadow: BitVector, qubits: int) -> tuple[np.ndarray, np.ndarray]:
    per_round = 3 * qubits
    if len(shadow) % per_round != 0:
        raise ValueError("shadow length inconsistent with qubit count")
    rounds = shadow.bits.reshape(-1, per_round)
    codes = rounds[:, 0 : 2 * qubits : 2] + 2 * rounds[:, 1 : 2 * qubits : 2]
    return codes.astype(np.int64), rounds[:, 2 * qubits :].astype(np.int64)


def reference_shadow_pair(copies: int, group_size: int = 2000) -> ShadowPair:
    """Random-basis single-qubit measurements with a median-of-means estimator.

    Per round each qubit is measured in a uniformly random X/Y/Z basis;
    the shadow records 2 basis bits plus 1 outcome bit per qubit per round.
    Estimation inverts the single-qubit depolarizing channel (factor 3 per
    matched qubit) and takes a median over means of ``group_size`` rounds.
    Only mask-type observables (I/Z/X factors) are supported.
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")

    def measure(rho: ClassicalDensityMatrix, rng) -> BitVector:
        gen = _as_generator(rng)
        n = rho.qubits
        codes = gen.integers(0, 3, size=(copies, n), dtype=np.int64)
        u = gen.random(copies)
        outcomes = np.empty((copies, n), dtype=np.uint8)
        # group identical basis rows so each distribution is built once
        keys = codes @ (3 ** np.arange(n, dtype=np.int64))
        for key in np.unique(keys):
            rows = np.nonzero(keys == key)[0]
            letters = "".join(LETTERS[c] for c in codes[rows[0]])
            cdf = np.cumsum(born_vector(rho, letters))
            idx = np.searchsorted(cdf, u[rows], side="right")
            idx = np.minimum(idx, cdf.shape[0] - 1)
            for t in range(n):
                outcomes[rows, t] = (idx >> t) & 1
        return _pack_rounds(codes, outcomes)

    def estimate(observable: PauliMask, shadow: BitVector) -> float:
        if not isinstance(observable, PauliMask):
            raise ObservableError("reference estimator supports mask observables only")
        n = observable.qubits
        codes, outcomes = _unpack_rounds(shadow, n)
        support = [t for t in range(n) if observable.letter(t + 1) != "I"]
        if not support:
            return 1.0
        want = np.array([_CODE[observable.letter(t + 1)] for t in support])
        matched = np.all(codes[:, support] == want, axis=1)
        signs = np.prod(1 - 2 * outcomes[:, support], axis=1)
        values = np.where(matched, (3.0 ** len(support)) * signs, 0.0)
        groups = max(1, values.shape[0] // group_size)
        means = [float(chunk.mean()) for chunk in np.array_split(values, groups)]
        return float(np.median(means))

    return ShadowPair(copies=copies, measure=measure, estimate=estimate)


@dataclass(frozen=True)
class OneWayShadowProtocol:
    """Runs a measure/estimate pair as Alice -> Bob with bit-exact accounting."""

    pair: ShadowPair

    def alice(self, state, rng) -> ProtocolMessage:
        """Measurement side; accepts a density matrix or a pure-state vector."""
        rho = (
            state
            if isinstance(state, ClassicalDensityMatrix)
            else ClassicalDensityMatrix.from_pure(state)
        )
        shadow = self.pair.measure(rho, rng)
        packed = np.packbits(shadow.bits, bitorder="little").tobytes()
        # the message is the raw shadow: its bit count IS the compression size
        return ProtocolMessage("shadow-adapter", packed, len(shadow))

    def bob(self, msg: ProtocolMessage, observable: PauliMask) -> float:
        raw = np.frombuffer(msg.main_payload, dtype=np.uint8)
        bits = np.unpackbits(raw, count=msg.main_bits, bitorder="little")
        return self.pair.estimate(observable, BitVector(bits))


def to_one_way_protocol(pair: ShadowPair) -> OneWayShadowProtocol:
    return OneWayShadowProtocol(pair)
