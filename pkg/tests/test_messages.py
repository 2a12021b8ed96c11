"""Wire format and bit accounting of the one-way message container."""
import pytest

from gapcomm.messages import (
    ByteReader,
    ByteWriter,
    MessageError,
    ProtocolMessage,
)


class TestProtocolMessage:
    def test_wire_round_trip(self):
        msg = ProtocolMessage("pauli-state", b"\xab\xcd", 16, b"\x01", 8)
        back = ProtocolMessage.from_wire(msg.to_wire())
        assert back == msg
        assert back.total_bits == 24

    def test_wire_header_layout(self):
        msg = ProtocolMessage("general-state", b"\x00" * 4, 32)
        wire = msg.to_wire()
        assert wire[:4] == b"GSTA"
        assert int.from_bytes(wire[4:12], "little") == 32
        assert int.from_bytes(wire[12:20], "little") == 0

    def test_ragged_bit_counts_allowed_within_a_byte(self):
        # raw-bit payloads (e.g. packed shadows) may pad up to 7 bits
        msg = ProtocolMessage("shadow-adapter", b"\x07", 3)
        assert ProtocolMessage.from_wire(msg.to_wire()) == msg

    def test_padding_overflow_rejected(self):
        with pytest.raises(MessageError):
            ProtocolMessage("pauli-state", b"\x00\x00", 3)

    def test_unknown_protocol_rejected(self):
        with pytest.raises(MessageError):
            ProtocolMessage("carrier-pigeon", b"", 0)

    def test_unknown_tag_rejected(self):
        wire = b"XXXX" + bytes(16)
        with pytest.raises(MessageError):
            ProtocolMessage.from_wire(wire)

    def test_truncated_wire_rejected(self):
        msg = ProtocolMessage("inner-product", b"\x01\x02", 16)
        with pytest.raises(MessageError):
            ProtocolMessage.from_wire(msg.to_wire()[:-1])


class TestByteWriterReader:
    def test_round_trip(self):
        w = ByteWriter()
        w.put_u64(2**40)
        w.put_u32(77)
        w.put_i64(-5)
        assert w.bits == 64 + 32 + 64
        r = ByteReader(w.getvalue())
        assert r.take_u64() == 2**40
        assert r.take_u32() == 77
        assert r.take_i64() == -5

    def test_embedded_payload_must_be_aligned(self):
        w = ByteWriter()
        with pytest.raises(MessageError):
            w.put_payload(b"\x00", 3)
