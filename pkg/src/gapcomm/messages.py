"""Bit-accounted one-way message container and its wire format."""
from __future__ import annotations

import struct
from dataclasses import dataclass

PROTOCOL_TAGS = {
    "general-state": b"GSTA",
    "pauli-state": b"PSTA",
    "observable-general": b"OGEN",
    "observable-pauli": b"OPAU",
    "inner-product": b"INNP",
    "shadow-adapter": b"SHDW",
}
_TAG_TO_PROTOCOL = {v: k for k, v in PROTOCOL_TAGS.items()}


class MessageError(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolMessage:
    """Alice's serialized payload, split into main and side-info sections.

    ``main_bits``/``side_bits`` are the exact information bit counts of the
    two sections; byte strings may carry up to 7 bits of padding beyond
    them, never more.
    """

    protocol: str
    main_payload: bytes
    main_bits: int
    side_payload: bytes = b""
    side_bits: int = 0

    def __post_init__(self):
        if self.protocol not in PROTOCOL_TAGS:
            raise MessageError(f"unknown protocol {self.protocol!r}")
        for name, payload, bits in (
            ("main", self.main_payload, self.main_bits),
            ("side", self.side_payload, self.side_bits),
        ):
            if bits < 0:
                raise MessageError(f"{name}_bits must be nonnegative")
            if not 0 <= 8 * len(payload) - bits < 8:
                raise MessageError(
                    f"{name}_bits {bits} inconsistent with {len(payload)} payload bytes"
                )

    @property
    def total_bits(self) -> int:
        return self.main_bits + self.side_bits

    def to_wire(self) -> bytes:
        """4-byte protocol tag, u64 main_bits, u64 side_bits, then payloads."""
        return (
            PROTOCOL_TAGS[self.protocol]
            + struct.pack("<QQ", self.main_bits, self.side_bits)
            + self.main_payload
            + self.side_payload
        )

    @staticmethod
    def from_wire(buf: bytes) -> "ProtocolMessage":
        if len(buf) < 20:
            raise MessageError("truncated message header")
        tag = buf[:4]
        protocol = _TAG_TO_PROTOCOL.get(tag)
        if protocol is None:
            raise MessageError(f"unknown protocol tag {tag!r}")
        main_bits, side_bits = struct.unpack_from("<QQ", buf, 4)
        main_len = (main_bits + 7) // 8
        side_len = (side_bits + 7) // 8
        if len(buf) != 20 + main_len + side_len:
            raise MessageError("message length inconsistent with declared bit counts")
        main = buf[20 : 20 + main_len]
        side = buf[20 + main_len :]
        return ProtocolMessage(protocol, main, main_bits, side, side_bits)


class ByteWriter:
    """Accumulates little-endian fields while tracking exact bit counts."""

    def __init__(self):
        self._parts: list[bytes] = []
        self.bits = 0

    def put_u32(self, value: int) -> None:
        self._parts.append(struct.pack("<I", value))
        self.bits += 32

    def put_u64(self, value: int) -> None:
        self._parts.append(struct.pack("<Q", value))
        self.bits += 64

    def put_i64(self, value: int) -> None:
        self._parts.append(struct.pack("<q", value))
        self.bits += 64

    def put_payload(self, payload: bytes, bits: int) -> None:
        if bits % 8 != 0 or len(payload) * 8 != bits:
            raise MessageError("embedded payloads must be byte-aligned")
        self._parts.append(payload)
        self.bits += bits

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class ByteReader:
    def __init__(self, buf: bytes):
        self._buf = buf
        self.offset = 0

    def take_u32(self) -> int:
        (v,) = struct.unpack_from("<I", self._buf, self.offset)
        self.offset += 4
        return v

    def take_u64(self) -> int:
        (v,) = struct.unpack_from("<Q", self._buf, self.offset)
        self.offset += 8
        return v

    def take_i64(self) -> int:
        (v,) = struct.unpack_from("<q", self._buf, self.offset)
        self.offset += 8
        return v
