"""Frame codec: round-trips, incremental stream decoding, malformed input."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emorelay.errors import MalformedFrame
from emorelay.protocol import (
    KIND_BINARY,
    KIND_JSON,
    Frame,
    FrameReader,
    binary_frame,
    decode_frame,
    encode_frame,
    json_frame,
)


class TestCodec:
    def test_json_frame_round_trip(self):
        message = {"type": "HELLO", "user_id": "alice"}
        frame = decode_frame(encode_frame(json_frame(message)))
        assert frame.kind == KIND_JSON
        assert frame.message() == message

    def test_binary_frame_round_trip(self):
        frame = decode_frame(encode_frame(binary_frame(b"\x00\x01\xff")))
        assert frame.kind == KIND_BINARY
        assert frame.payload == b"\x00\x01\xff"

    def test_wire_layout(self):
        wire = encode_frame(binary_frame(b"abc"))
        assert wire == b"\x00\x00\x00\x04" + b"\x01" + b"abc"

    @settings(max_examples=100, deadline=None)
    @given(st.binary(max_size=2048), st.sampled_from([KIND_JSON, KIND_BINARY]))
    def test_any_payload_round_trips(self, payload, kind):
        frame = Frame(kind=kind, payload=payload)
        assert decode_frame(encode_frame(frame)) == frame

    def test_truncated_frame_rejected(self):
        wire = encode_frame(binary_frame(b"abcdef"))
        with pytest.raises(MalformedFrame):
            decode_frame(wire[:-2])

    def test_overlong_frame_rejected(self):
        wire = encode_frame(binary_frame(b"abc")) + b"zz"
        with pytest.raises(MalformedFrame):
            decode_frame(wire)

    def test_unknown_kind_rejected(self):
        wire = bytearray(encode_frame(binary_frame(b"abc")))
        wire[4] = 7
        with pytest.raises(MalformedFrame):
            decode_frame(bytes(wire))

    def test_declared_length_cap(self):
        with pytest.raises(MalformedFrame):
            decode_frame(b"\xff\xff\xff\xff\x00")

    def test_json_frame_requires_type(self):
        frame = Frame(kind=KIND_JSON, payload=b'{"no_type": 1}')
        with pytest.raises(MalformedFrame):
            frame.message()

    def test_binary_frame_has_no_message(self):
        with pytest.raises(MalformedFrame):
            binary_frame(b"x").message()


class TestFrameReader:
    def test_single_byte_dribble(self):
        frames = [json_frame({"type": "A"}), binary_frame(b"payload"), json_frame({"type": "B"})]
        wire = b"".join(encode_frame(f) for f in frames)
        reader = FrameReader()
        seen = []
        for i in range(len(wire)):
            seen.extend(reader.feed(wire[i : i + 1]))
        assert seen == frames

    def test_coalesced_feed(self):
        frames = [binary_frame(bytes(range(100))), json_frame({"type": "C", "x": 1})]
        wire = b"".join(encode_frame(f) for f in frames)
        reader = FrameReader()
        assert reader.feed(wire) == frames

    def test_partial_then_rest(self):
        frame = binary_frame(b"0123456789")
        wire = encode_frame(frame)
        reader = FrameReader()
        assert reader.feed(wire[:7]) == []
        assert reader.feed(wire[7:]) == [frame]
