"""The five one-way protocols: Alice encoders, Bob decoders, exact targets.

Every protocol reduces an index query to reading a gap-Hamming distance off
an expectation value. Alice partitions her string into blocks, encodes each
block with the majority gadget, and ships some exact-arithmetic object; Bob
turns his index into an observable (or state), asks the estimation oracle
for one value, rescales with the integer side information, and thresholds
the reconstructed distance.

Side-info formats (all little-endian):
  general-state       u64 D | u32 count | count * u32 nnz(a^j)
  pauli-state         u64 scaled norm | u32 count | count * u32 nnz(a^j)
  observable-general  u64 norm (32-bit fixed point) | u32 count | count * u32 nnz(a^j)
  observable-pauli    u64 codeword length
  inner-product       u64 D | u32 count | count * u32 nnz(a^j)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import oracle as oracle_mod
from .bits import BitVector, IndexingInstance, SharedRandomness
from .fwht import fwht
from .ghd import (
    GhdParams,
    decision_threshold,
    decode_bit,
    delta_from_sum_norm,
    encode_bob,
    public_pads,
)
from .messages import ByteReader, ByteWriter, MessageError, ProtocolMessage
from .observables import operator_norm
from .pauli import PauliMask, pauli_expectation, subset_state_expectation
from .states import ExactState
from . import _kernels

PROTOCOL_KINDS = (
    "general-state",
    "pauli-state",
    "observable-general",
    "observable-pauli",
    "inner-product",
)

# Oracle accuracy budgets: a relative error eps_o on the protocol's target
# becomes an additive error on the reconstructed distance of at most
# kappa * eps_o * code_len (general/pauli/observable-general rescale a
# squared norm bounded by 4*code_len, inner-product doubles an inner
# product bounded by code_len, observable-pauli rescales the distance
# itself). Budgeting eps_o = slack_d / (kappa * sqrt(code_len)) therefore
# caps the distance error at slack_d * sqrt(code_len) on every draw.
_KAPPA = {
    "general-state": 4.0,
    "pauli-state": 4.0,
    "observable-general": 4.0,
    "observable-pauli": 1.0,
    "inner-product": 2.0,
}

# Desk-scale guards: dense state messages and dense observable payloads.
MAX_STATE_QUBITS = 24
MAX_OBSERVABLE_QUBITS = 10

# Fixed-point scales for the observable-general payload.
ENTRY_FRAC_BITS = 48
NORM_FRAC_BITS = 32


class ConfigError(ValueError):
    pass


class ProtocolError(RuntimeError):
    """A degenerate instance the protocol cannot decode (counted, not fatal)."""


@dataclass(frozen=True)
class ProtocolConfig:
    """One protocol kind pinned to a qubit count and gadget parameters.

    ``qubits`` is the state size n for the state-sending protocols and the
    classical string budget for observable-pauli (whose simulated state is
    tiny). ``oracle_slack`` >= 1 divides the derived oracle accuracy budget
    for extra safety margin.
    """

    kind: str
    qubits: int
    ghd: GhdParams
    oracle_slack: float = 1.0

    def __post_init__(self):
        if self.kind not in PROTOCOL_KINDS:
            raise ConfigError(f"unknown protocol kind {self.kind!r}")
        if self.qubits < 1:
            raise ConfigError("qubits must be >= 1")
        if self.oracle_slack < 1.0:
            raise ConfigError("oracle_slack must be >= 1")
        lo = self.epsilon_floor
        if not lo < self.ghd.epsilon < 1.0:
            raise ConfigError(
                f"epsilon {self.ghd.epsilon} outside validity interval ({lo:.6g}, 1) "
                f"for {self.kind} at n={self.qubits}"
            )
        if self.capacity < 1:
            raise ConfigError(
                f"no index capacity: block count {self.block_count} must exceed "
                f"gamma {self.ghd.gamma}"
            )
        if self.kind == "observable-general" and self.qubits > MAX_OBSERVABLE_QUBITS:
            raise ConfigError(
                f"observable-general payload is dense; capped at {MAX_OBSERVABLE_QUBITS} qubits"
            )
        if self.kind in ("general-state", "inner-product") and (
            self.qubits + self.pad_exponent > MAX_STATE_QUBITS
        ):
            raise ConfigError("stacked state exceeds the desk-scale memory cap")

    @property
    def epsilon_floor(self) -> float:
        if self.kind == "observable-general":
            return 2.0 ** (-self.qubits / 2.0)
        if self.kind == "observable-pauli":
            return self.qubits ** (-1.0 / 4.0)
        return 2.0 ** (-self.qubits / 4.0)

    @cached_property
    def pad_exponent(self) -> int:
        """Smallest q with amp_factor <= 2**q."""
        return max(0, (self.ghd.amp_factor - 1).bit_length())

    @cached_property
    def block_count(self) -> int:
        if self.kind == "observable-general":
            return 1 << self.qubits
        if self.kind == "observable-pauli":
            return math.isqrt(self.qubits)
        return math.isqrt(1 << self.qubits)

    @cached_property
    def capacity(self) -> int:
        """Length of the index string the reduction can serve."""
        return (self.block_count - self.ghd.gamma) * self.ghd.gamma

    @property
    def oracle_accuracy(self) -> float:
        g = self.ghd
        return g.slack_d / (_KAPPA[self.kind] * math.sqrt(g.code_len) * self.oracle_slack)


def decompose_index(l: int, gamma: int) -> tuple[int, int]:
    """Split l = i + (j-1)*gamma into (i, j), both 1-based."""
    if l < 1:
        raise IndexError(f"index {l} must be >= 1")
    return (l - 1) % gamma + 1, (l - 1) // gamma + 1


def _require_index(l: int, cfg: ProtocolConfig) -> tuple[int, int]:
    if not 1 <= l <= cfg.capacity:
        raise IndexError(f"index {l} out of range [1, {cfg.capacity}]")
    return decompose_index(l, cfg.ghd.gamma)


def _source_bits(inst) -> BitVector:
    return inst.x if isinstance(inst, IndexingInstance) else inst


def encode_block_matrices(
    x: BitVector, cfg: ProtocolConfig, sr: SharedRandomness
) -> tuple[np.ndarray, np.ndarray]:
    """All Alice codewords (rows) and all Bob codewords (rows), as 0/1 matrices.

    Uses one shared pad matrix for every block, exactly as both parties
    derive it; ``encode_alice``/``encode_bob`` applied block by block agree
    bit for bit.
    """
    params = cfg.ghd
    if len(x) != cfg.capacity:
        raise ConfigError(f"instance length {len(x)} != capacity {cfg.capacity}")
    pads = public_pads(params, sr)
    nblocks = cfg.block_count - params.gamma
    blocks = x.bits.reshape(nblocks, params.gamma)
    a_rows = np.zeros((nblocks, params.code_len), dtype=np.uint8)
    for jj in range(nblocks):
        sel = np.nonzero(blocks[jj])[0].astype(np.int64)
        if sel.size:
            a_rows[jj] = _kernels.majority_rows(pads, sel)
    b_rows = np.ascontiguousarray(pads.T)
    return a_rows, b_rows


def partition_and_encode(
    inst, cfg: ProtocolConfig, sr: SharedRandomness
) -> tuple[tuple[BitVector, ...], tuple[BitVector, ...]]:
    """Block-encoded codewords as BitVector tuples."""
    a_rows, b_rows = encode_block_matrices(_source_bits(inst), cfg, sr)
    return (
        tuple(BitVector(row) for row in a_rows),
        tuple(BitVector(row) for row in b_rows),
    )


@dataclass(frozen=True)
class BobResult:
    """Decoded bit plus the quantities the decoder actually handled."""

    bit: int
    target: object  # exact oracle input: Fraction where exactness is possible
    estimate: object
    delta_estimate: object
    push: int


def _push_direction(delta_exact, threshold: float) -> int:
    # The reconstructed distance decreases in the estimate for every
    # protocol here, so pushing the ESTIMATE up drags the distance toward
    # a threshold sitting below it, and vice versa.
    return oracle_mod.PUSH_UP if delta_exact > threshold else oracle_mod.PUSH_DOWN


def _write_weight_side(first_field: int, nnz_list) -> tuple[bytes, int]:
    w = ByteWriter()
    w.put_u64(first_field)
    w.put_u32(len(nnz_list))
    for v in nnz_list:
        w.put_u32(int(v))
    return w.getvalue(), w.bits


def _read_weight_side(payload: bytes) -> tuple[int, list[int]]:
    r = ByteReader(payload)
    first = r.take_u64()
    count = r.take_u32()
    return first, [r.take_u32() for _ in range(count)]


# ---------------------------------------------------------------------------
# general-state: Alice ships the stacked codeword state, Bob contracts with
# a two-block averaging observable.
# ---------------------------------------------------------------------------

def general_state_alice(inst, cfg: ProtocolConfig, sr: SharedRandomness) -> ProtocolMessage:
    if cfg.kind != "general-state":
        raise ConfigError("config kind mismatch")
    a_rows, b_rows = encode_block_matrices(_source_bits(inst), cfg, sr)
    dim = 1 << (cfg.qubits + cfg.pad_exponent)
    stacked = np.zeros(dim, dtype=np.int64)
    occupied = np.concatenate([a_rows.reshape(-1), b_rows.reshape(-1)]).astype(np.int64)
    stacked[: occupied.shape[0]] = occupied
    total = int(occupied.sum())
    if total == 0:
        raise ProtocolError("all-zero instance produced the zero vector")
    state = ExactState(qubits=cfg.qubits + cfg.pad_exponent, norm_sq=total, numerators=stacked)
    main, main_bits = state.serialize()
    side, side_bits = _write_weight_side(total, a_rows.sum(axis=1))
    return ProtocolMessage("general-state", main, main_bits, side, side_bits)


def general_state_bob(
    msg: ProtocolMessage,
    l: int,
    cfg: ProtocolConfig,
    sr: SharedRandomness,
    spec: oracle_mod.OracleSpec,
) -> BobResult:
    if msg.protocol != "general-state":
        raise MessageError("wrong message for general-state decoder")
    i, j = _require_index(l, cfg)
    state, _ = ExactState.deserialize(msg.main_payload)
    norm_sq, nnz_a_list = _read_weight_side(msg.side_payload)
    code_len = cfg.ghd.code_len
    blk_a = state.numerators[(j - 1) * code_len : j * code_len]
    col = cfg.block_count - cfg.ghd.gamma + i
    blk_b = state.numerators[(col - 1) * code_len : col * code_len]
    sum_norm = int(np.dot(blk_a + blk_b, blk_a + blk_b))
    target = Fraction(sum_norm, 2 * norm_sq)

    nnz_a = nnz_a_list[j - 1]
    nnz_b = encode_bob(i, cfg.ghd, sr).nnz
    threshold = decision_threshold(cfg.ghd)
    push = _push_direction(delta_from_sum_norm(sum_norm, nnz_a, nnz_b), threshold)
    est = oracle_mod.estimate(target, spec, push)
    delta_est = delta_from_sum_norm(2 * norm_sq * est, nnz_a, nnz_b)
    return BobResult(decode_bit(delta_est, cfg.ghd), target, est, delta_est, push)


def general_state_ml_strip(cfg: ProtocolConfig, l: int) -> np.ndarray:
    """The nonzero rows of Bob's contraction operator, as a dense strip.

    Row k has 1/sqrt(2) at the two columns the decoder averages; the full
    operator is this strip padded with zero rows, and the observable Bob
    queries is strip^T @ strip.
    """
    i, j = _require_index(l, cfg)
    code_len = cfg.ghd.code_len
    dim = 1 << (cfg.qubits + cfg.pad_exponent)
    col = cfg.block_count - cfg.ghd.gamma + i
    strip = np.zeros((code_len, dim), dtype=np.float64)
    amp = 1.0 / math.sqrt(2.0)
    for k in range(code_len):
        strip[k, (j - 1) * code_len + k] = amp
        strip[k, (col - 1) * code_len + k] += amp
    return strip


# ---------------------------------------------------------------------------
# pauli-state: Alice solves the character system over all pairwise sum-norms
# and ships the solution stacked against a flat reference half; Bob reads
# one sum-norm back off a single Z-string (tensored with a final X).
# ---------------------------------------------------------------------------

def _pairwise_sum_norms(a_rows: np.ndarray, b_rows: np.ndarray) -> np.ndarray:
    """All ||a^j + b^i||^2 in index-major order ((j-1)*gamma + i - 1)."""
    a64 = a_rows.astype(np.int64)
    b64 = b_rows.astype(np.int64)
    cross = a64 @ b64.T
    nnz_a = a64.sum(axis=1)
    nnz_b = b64.sum(axis=1)
    return (nnz_a[:, None] + nnz_b[None, :] + 2 * cross).reshape(-1)


def pauli_state_alice(inst, cfg: ProtocolConfig, sr: SharedRandomness) -> ProtocolMessage:
    if cfg.kind != "pauli-state":
        raise ConfigError("config kind mismatch")
    a_rows, b_rows = encode_block_matrices(_source_bits(inst), cfg, sr)
    n = cfg.qubits
    dim = 1 << n
    stacked = np.zeros(dim, dtype=np.int64)
    norms = _pairwise_sum_norms(a_rows, b_rows)
    stacked[: norms.shape[0]] = norms
    # Solving transform(v) = stacked gives v in 2^-n increments; scaling all
    # amplitudes by 2^n keeps the whole state integral.
    tilde_v = fwht(stacked)
    numerators = np.concatenate([tilde_v, np.full(dim, dim, dtype=np.int64)])
    state = ExactState.dense(numerators, qubits=n + 1)
    main, main_bits = state.serialize()
    side, side_bits = _write_weight_side(state.norm_sq, a_rows.sum(axis=1))
    return ProtocolMessage("pauli-state", main, main_bits, side, side_bits)


def pauli_state_bob(
    msg: ProtocolMessage,
    l: int,
    cfg: ProtocolConfig,
    sr: SharedRandomness,
    spec: oracle_mod.OracleSpec,
) -> BobResult:
    if msg.protocol != "pauli-state":
        raise MessageError("wrong message for pauli-state decoder")
    i, j = _require_index(l, cfg)
    state, _ = ExactState.deserialize(msg.main_payload)
    scaled_norm, nnz_a_list = _read_weight_side(msg.side_payload)
    n = cfg.qubits
    mask = PauliMask.from_ints(z=l - 1, x=1 << n, qubits=n + 1)
    target = pauli_expectation(state, mask)

    # target = 2 * sum_norm / D with D = scaled_norm / 2^{2n}; undoing the
    # scale turns the estimate back into a sum-norm estimate.
    rescale = Fraction(scaled_norm, 1 << (2 * n + 1))
    nnz_a = nnz_a_list[j - 1]
    nnz_b = encode_bob(i, cfg.ghd, sr).nnz
    threshold = decision_threshold(cfg.ghd)
    push = _push_direction(delta_from_sum_norm(target * rescale, nnz_a, nnz_b), threshold)
    est = oracle_mod.estimate(target, spec, push)
    sum_norm_est = est * rescale if isinstance(est, Fraction) else float(est) * float(rescale)
    delta_est = delta_from_sum_norm(sum_norm_est, nnz_a, nnz_b)
    return BobResult(decode_bit(delta_est, cfg.ghd), target, est, delta_est, push)


# ---------------------------------------------------------------------------
# observable-general: Alice ships the normalized Gram matrix of all her
# codeword columns; Bob contracts it with a two-point state.
# ---------------------------------------------------------------------------

def observable_general_alice(inst, cfg: ProtocolConfig, sr: SharedRandomness) -> ProtocolMessage:
    if cfg.kind != "observable-general":
        raise ConfigError("config kind mismatch")
    a_rows, b_rows = encode_block_matrices(_source_bits(inst), cfg, sr)
    columns = np.concatenate([a_rows, b_rows], axis=0).astype(np.float64).T  # (code_len, 2^n)
    dim = 1 << cfg.qubits
    gram = columns.T @ columns  # integer-valued, exact in float64 at this scale
    if np.any(columns):
        # both Gram sides share the nonzero spectrum; iterate on the smaller
        small = gram if dim <= cfg.ghd.code_len else columns @ columns.T
        norm_fp = round(operator_norm(small) * (1 << NORM_FRAC_BITS))
        quantized_norm = norm_fp / (1 << NORM_FRAC_BITS)
        entries_fp = np.round(gram / quantized_norm * (1 << ENTRY_FRAC_BITS))
    else:
        # all-zero matrix is sent unnormalized
        norm_fp = 0
        entries_fp = np.zeros((dim, dim))
    w = ByteWriter()
    w.put_u32(cfg.qubits)
    payload = entries_fp.astype("<i8").tobytes()
    w.put_payload(payload, 64 * dim * dim)
    side, side_bits = _write_weight_side(norm_fp, a_rows.sum(axis=1))
    return ProtocolMessage("observable-general", w.getvalue(), w.bits, side, side_bits)


def observable_general_bob(
    msg: ProtocolMessage,
    l: int,
    cfg: ProtocolConfig,
    sr: SharedRandomness,
    spec: oracle_mod.OracleSpec,
) -> BobResult:
    if msg.protocol != "observable-general":
        raise MessageError("wrong message for observable-general decoder")
    i, j = _require_index(l, cfg)
    r = ByteReader(msg.main_payload)
    n = r.take_u32()
    dim = 1 << n
    entries_fp = np.frombuffer(
        msg.main_payload, dtype="<i8", count=dim * dim, offset=r.offset
    ).reshape(dim, dim)
    norm_fp, nnz_a_list = _read_weight_side(msg.side_payload)

    col_a = j - 1
    col_b = (dim - cfg.ghd.gamma) + i - 1
    quad = int(entries_fp[col_a, col_a]) + 2 * int(entries_fp[col_a, col_b]) + int(
        entries_fp[col_b, col_b]
    )
    target = Fraction(quad, 1 << (ENTRY_FRAC_BITS + 1))

    rescale = 2 * Fraction(norm_fp, 1 << NORM_FRAC_BITS)
    nnz_a = nnz_a_list[j - 1]
    nnz_b = encode_bob(i, cfg.ghd, sr).nnz
    threshold = decision_threshold(cfg.ghd)
    push = _push_direction(delta_from_sum_norm(target * rescale, nnz_a, nnz_b), threshold)
    est = oracle_mod.estimate(target, spec, push)
    sum_norm_est = est * rescale if isinstance(est, Fraction) else float(est) * float(rescale)
    delta_est = delta_from_sum_norm(sum_norm_est, nnz_a, nnz_b)
    return BobResult(decode_bit(delta_est, cfg.ghd), target, est, delta_est, push)


# ---------------------------------------------------------------------------
# observable-pauli: Alice ships one long Z-string spelled by all codewords;
# Bob reads the distance off a two-hot subset state. The simulated state is
# tiny (codeword-many support points) while the mask is long, so basis
# indices are arbitrary-precision integers here.
# ---------------------------------------------------------------------------

def observable_pauli_alice(inst, cfg: ProtocolConfig, sr: SharedRandomness) -> ProtocolMessage:
    if cfg.kind != "observable-pauli":
        raise ConfigError("config kind mismatch")
    a_rows, b_rows = encode_block_matrices(_source_bits(inst), cfg, sr)
    z_bits = np.concatenate(
        [a_rows.reshape(-1), b_rows.reshape(-1), np.ones(1, dtype=np.uint8)]
    )
    # the Z-string IS the message; the x-mask is structurally zero here
    main, main_bits = BitVector(z_bits).serialize()
    w = ByteWriter()
    w.put_u64(cfg.ghd.code_len)
    return ProtocolMessage("observable-pauli", main, main_bits, w.getvalue(), w.bits)


def observable_pauli_bob(
    msg: ProtocolMessage,
    l: int,
    cfg: ProtocolConfig,
    sr: SharedRandomness,
    spec: oracle_mod.OracleSpec,
) -> BobResult:
    if msg.protocol != "observable-pauli":
        raise MessageError("wrong message for observable-pauli decoder")
    i, j = _require_index(l, cfg)
    z_vector, _ = BitVector.deserialize(msg.main_payload)
    mask = PauliMask(z_vector, BitVector.zeros(len(z_vector)))
    r = ByteReader(msg.side_payload)
    code_len = r.take_u64()
    z_int = mask.z_int

    # Subset state: one two-hot string per code position, pairing Alice's
    # block-j bit with Bob's block bit, plus the marked last-qubit point
    # carrying squared weight code_len.
    col = cfg.block_count - cfg.ghd.gamma + i
    support = []
    for k in range(code_len):
        idx = (1 << ((j - 1) * code_len + k)) | (1 << ((col - 1) * code_len + k))
        support.append((idx, 1))
    subset_part = subset_state_expectation(z_int, support, 2 * code_len)
    marked_index = 1 << (mask.qubits - 1)
    marked_sign = mask.diagonal_sign(marked_index)
    target = subset_part + Fraction(marked_sign * code_len, 2 * code_len)

    threshold = decision_threshold(cfg.ghd)
    push = _push_direction(-code_len * target, threshold)
    est = oracle_mod.estimate(target, spec, push)
    delta_est = -code_len * est
    return BobResult(decode_bit(delta_est, cfg.ghd), target, est, delta_est, push)


# ---------------------------------------------------------------------------
# inner-product: Alice ships her stacked codeword state; Bob aligns his
# single codeword at the queried block and estimates the overlap.
# ---------------------------------------------------------------------------

def inner_product_alice(inst, cfg: ProtocolConfig, sr: SharedRandomness) -> ProtocolMessage:
    if cfg.kind != "inner-product":
        raise ConfigError("config kind mismatch")
    a_rows, _ = encode_block_matrices(_source_bits(inst), cfg, sr)
    dim = 1 << (cfg.qubits + cfg.pad_exponent)
    stacked = np.zeros(dim, dtype=np.int64)
    flat = a_rows.reshape(-1).astype(np.int64)
    stacked[: flat.shape[0]] = flat
    total = int(flat.sum())
    if total == 0:
        raise ProtocolError("all-zero instance produced the zero vector")
    state = ExactState(qubits=cfg.qubits + cfg.pad_exponent, norm_sq=total, numerators=stacked)
    main, main_bits = state.serialize()
    side, side_bits = _write_weight_side(total, a_rows.sum(axis=1))
    return ProtocolMessage("inner-product", main, main_bits, side, side_bits)


def inner_product_bob(
    msg: ProtocolMessage,
    l: int,
    cfg: ProtocolConfig,
    sr: SharedRandomness,
    spec: oracle_mod.OracleSpec,
) -> BobResult:
    if msg.protocol != "inner-product":
        raise MessageError("wrong message for inner-product decoder")
    i, j = _require_index(l, cfg)
    state, _ = ExactState.deserialize(msg.main_payload)
    norm_sq, nnz_a_list = _read_weight_side(msg.side_payload)
    code_len = cfg.ghd.code_len
    b = encode_bob(i, cfg.ghd, sr)
    own_norm = b.nnz
    if own_norm == 0:
        raise ProtocolError("Bob's codeword is the zero vector")
    blk = state.numerators[(j - 1) * code_len : j * code_len]
    cross = int(np.dot(blk, b.bits.astype(np.int64)))
    scale = math.sqrt(norm_sq * own_norm)
    target = cross / scale

    nnz_a = nnz_a_list[j - 1]
    threshold = decision_threshold(cfg.ghd)
    push = _push_direction(nnz_a + own_norm - 2 * cross, threshold)
    est = oracle_mod.estimate(target, spec, push)
    delta_est = nnz_a + own_norm - 2.0 * float(est) * scale
    return BobResult(decode_bit(delta_est, cfg.ghd), target, est, delta_est, push)


ALICE = {
    "general-state": general_state_alice,
    "pauli-state": pauli_state_alice,
    "observable-general": observable_general_alice,
    "observable-pauli": observable_pauli_alice,
    "inner-product": inner_product_alice,
}

BOB = {
    "general-state": general_state_bob,
    "pauli-state": pauli_state_bob,
    "observable-general": observable_general_bob,
    "observable-pauli": observable_pauli_bob,
    "inner-product": inner_product_bob,
}
