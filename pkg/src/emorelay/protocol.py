"""Length-prefixed frame codec and the control-message vocabulary.

Every frame is a 4-byte big-endian length (covering the rest of the frame),
one kind byte (0 = JSON control message, 1 = binary payload), then the
payload. Audio travels as a binary frame announced by the preceding JSON
frame, which avoids base64 inflation.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

from .errors import MalformedFrame

KIND_JSON = 0
KIND_BINARY = 1

MAX_FRAME_BYTES = 16 * 1024 * 1024

# client -> server
T_HELLO = "HELLO"
T_PAIR = "PAIR"
T_UPLOAD_META = "UPLOAD_META"
T_SEND = "SEND"
T_FETCH_AUDIO = "FETCH_AUDIO"
T_BYE = "BYE"

# server -> client
T_HELLO_OK = "HELLO_OK"
T_PAIRED = "PAIRED"
T_RECOMMENDATION = "RECOMMENDATION"
T_SEND_OK = "SEND_OK"
T_DELIVER = "DELIVER"
T_AUDIO = "AUDIO"
T_ERROR = "ERROR"


@dataclass(frozen=True)
class Frame:
    kind: int
    payload: bytes

    def message(self) -> dict:
        """Parse a JSON control frame's payload."""
        if self.kind != KIND_JSON:
            raise MalformedFrame("expected a JSON frame")
        try:
            obj = json.loads(self.payload.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise MalformedFrame(f"bad JSON payload: {exc}") from None
        if not isinstance(obj, dict) or not isinstance(obj.get("type"), str):
            raise MalformedFrame("control message must be an object with a string 'type'")
        return obj


def json_frame(message: dict) -> Frame:
    return Frame(kind=KIND_JSON, payload=json.dumps(message, separators=(",", ":")).encode())


def binary_frame(data: bytes) -> Frame:
    return Frame(kind=KIND_BINARY, payload=bytes(data))


def encode_frame(frame: Frame) -> bytes:
    body = bytes([frame.kind]) + frame.payload
    if len(body) > MAX_FRAME_BYTES:
        raise MalformedFrame(f"frame of {len(body)} bytes exceeds the {MAX_FRAME_BYTES} cap")
    return struct.pack(">I", len(body)) + body


def decode_frame(data: bytes) -> Frame:
    """Decode exactly one full frame from a byte string."""
    if len(data) < 5:
        raise MalformedFrame("frame shorter than its fixed header")
    (length,) = struct.unpack_from(">I", data, 0)
    if length > MAX_FRAME_BYTES:
        raise MalformedFrame(f"declared length {length} exceeds the {MAX_FRAME_BYTES} cap")
    if len(data) != 4 + length:
        raise MalformedFrame(f"container is {len(data)} bytes, header promises {4 + length}")
    kind = data[4]
    if kind not in (KIND_JSON, KIND_BINARY):
        raise MalformedFrame(f"unknown frame kind {kind}")
    return Frame(kind=kind, payload=data[5:])


class FrameReader:
    """Incremental decoder for frames arriving over a raw byte stream."""

    def __init__(self) -> None:
        self._buffer = bytearray()

    def feed(self, data: bytes) -> list[Frame]:
        self._buffer.extend(data)
        frames = []
        while True:
            if len(self._buffer) < 4:
                break
            (length,) = struct.unpack_from(">I", self._buffer, 0)
            if length > MAX_FRAME_BYTES:
                raise MalformedFrame(f"declared length {length} exceeds the cap")
            if length < 1:
                raise MalformedFrame("frame without a kind byte")
            if len(self._buffer) < 4 + length:
                break
            chunk = bytes(self._buffer[: 4 + length])
            del self._buffer[: 4 + length]
            frames.append(decode_frame(chunk))
        return frames


def error_message(code: str, detail: str) -> dict:
    return {"type": T_ERROR, "code": code, "detail": detail}
