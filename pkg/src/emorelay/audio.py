"""WAV parsing, normalization, and the canonical clip representation.

Every clip is normalized to 16 kHz mono float64 in [-1, 1]. All downstream
stages (feature extraction, classification, storage) consume only this
canonical form.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .errors import MalformedContainer, TooShort, UnsupportedEncoding, UnsupportedRate

CANONICAL_RATE_HZ = 16000
MIN_SAMPLES = 400  # one full 25 ms analysis frame at 16 kHz
ACCEPTED_RATES_HZ = frozenset({8000, 16000, 22050, 44100, 48000})

_INT16_SCALE = 32768.0


@dataclass(frozen=True)
class AudioClip:
    """Validated mono PCM audio at the canonical rate."""

    samples: np.ndarray
    sample_rate_hz: int = CANONICAL_RATE_HZ

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.sample_rate_hz != CANONICAL_RATE_HZ:
            raise ValueError(f"clip rate must be {CANONICAL_RATE_HZ} Hz, got {self.sample_rate_hz}")
        if samples.ndim != 1:
            raise ValueError("clip samples must be one-dimensional")
        if len(samples) < MIN_SAMPLES:
            raise TooShort(f"{len(samples)} samples; at least {MIN_SAMPLES} required")
        if not np.all(np.isfinite(samples)):
            raise ValueError("clip samples must be finite")
        if np.any(samples < -1.0) or np.any(samples > 1.0):
            raise ValueError("clip samples must lie in [-1, 1]")

    @property
    def duration_ms(self) -> int:
        return round(1000 * len(self.samples) / self.sample_rate_hz)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AudioClip):
            return NotImplemented
        return self.sample_rate_hz == other.sample_rate_hz and np.array_equal(
            self.samples, other.samples
        )


def downmix_stereo(channels: np.ndarray) -> np.ndarray:
    """Average an (n, 2) channel array into mono. Identical channels pass through exactly."""
    return channels.mean(axis=1)


def resample_linear(samples: np.ndarray, source_rate_hz: int, target_rate_hz: int) -> np.ndarray:
    """Resample by linear interpolation.

    Output index j reads source position j * source_rate / target_rate;
    positions past the final source sample clamp to it. Output length is
    round(n * target / source), so duration is preserved within half a
    target sample period.
    """
    if source_rate_hz == target_rate_hz:
        return np.asarray(samples, dtype=np.float64)
    n = len(samples)
    m = round(n * target_rate_hz / source_rate_hz)
    positions = np.arange(m, dtype=np.float64) * (source_rate_hz / target_rate_hz)
    return np.interp(positions, np.arange(n, dtype=np.float64), samples)


def parse_wav(data: bytes) -> AudioClip:
    """Parse a RIFF/WAVE byte string into a canonical AudioClip.

    Accepts 16-bit PCM, 1 or 2 channels, at any rate in ACCEPTED_RATES_HZ.
    Stereo is downmixed by per-sample mean; non-canonical rates are resampled
    by linear interpolation; 16-bit integers map to [-1, 1] via division
    by 32768.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedContainer("missing RIFF/WAVE header")

    fmt = None
    pcm_bytes = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset : offset + 4]
        (chunk_size,) = struct.unpack_from("<I", data, offset + 4)
        body_start = offset + 8
        if body_start + chunk_size > len(data):
            raise MalformedContainer(f"chunk {chunk_id!r} overruns container")
        body = data[body_start : body_start + chunk_size]
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise MalformedContainer("fmt chunk too small")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            pcm_bytes = body
        # chunks are word-aligned; odd sizes carry a pad byte
        offset = body_start + chunk_size + (chunk_size & 1)

    if fmt is None or pcm_bytes is None:
        raise MalformedContainer("missing fmt or data chunk")

    audio_format, channels, rate, _byte_rate, _block_align, bits = fmt
    if audio_format != 1 or bits != 16:
        raise UnsupportedEncoding(f"need 16-bit PCM, got format={audio_format} bits={bits}")
    if channels not in (1, 2):
        raise UnsupportedEncoding(f"need 1 or 2 channels, got {channels}")
    if rate not in ACCEPTED_RATES_HZ:
        raise UnsupportedRate(f"{rate} Hz not in {sorted(ACCEPTED_RATES_HZ)}")
    if len(pcm_bytes) % (2 * channels) != 0:
        raise MalformedContainer("data chunk size not a multiple of the frame size")

    samples = np.frombuffer(pcm_bytes, dtype="<i2").astype(np.float64) / _INT16_SCALE
    if channels == 2:
        samples = downmix_stereo(samples.reshape(-1, 2))
    samples = resample_linear(samples, rate, CANONICAL_RATE_HZ)
    if len(samples) < MIN_SAMPLES:
        raise TooShort(f"{len(samples)} samples after normalization; need {MIN_SAMPLES}")
    return AudioClip(samples=samples)


def pcm16_bytes(clip: AudioClip) -> bytes:
    """Canonical little-endian 16-bit re-encoding of the clip's samples."""
    ints = np.clip(np.round(clip.samples * _INT16_SCALE), -32768, 32767).astype("<i2")
    return ints.tobytes()


def encode_wav(clip: AudioClip) -> bytes:
    """Serialize a clip as canonical 16 kHz mono 16-bit PCM RIFF/WAVE."""
    pcm = pcm16_bytes(clip)
    rate = clip.sample_rate_hz
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(pcm),
        b"WAVE",
        b"fmt ",
        16,
        1,  # PCM
        1,  # mono
        rate,
        rate * 2,
        2,
        16,
        b"data",
        len(pcm),
    )
    return header + pcm


def clip_digest(clip: AudioClip) -> str:
    """SHA-256 hex digest of the canonical PCM re-encoding; equal clips hash equal."""
    return hashlib.sha256(pcm16_bytes(clip)).hexdigest()
