"""Per-modality emotion classifiers: acoustic (MFCC-driven) and textual (lexicon-driven).

The acoustic path runs a dense-layer inference container loaded from a weight
file, with a deterministic signal-statistics heuristic as the zero-asset
fallback. The text path scores transcripts against a keyword lexicon whose
labels follow an explicit fine-grained-to-canonical taxonomy table.
"""

from __future__ import annotations

import json
import string
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np

from .audio import AudioClip, clip_digest
from .emotions import N_EMOTIONS, EmotionDistribution, emotion_index
from .errors import (
    BadMagic,
    DimensionMismatch,
    SchemaViolation,
    TruncatedFile,
    VersionUnsupported,
)
from .features import N_COEFFICIENTS, FeatureVector

ACTIVATION_IDENTITY = 0
ACTIVATION_RELU = 1

_EMOW_MAGIC = b"EMOW"
_EMOW_VERSION = 1


@dataclass(frozen=True)
class DenseLayer:
    weights: np.ndarray  # (rows, cols), applied as x @ weights + biases
    biases: np.ndarray  # (cols,)
    activation: int

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float32)
        b = np.asarray(self.biases, dtype=np.float32)
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise DimensionMismatch(f"bad weight shape {w.shape}")
        if b.shape != (w.shape[1],):
            raise DimensionMismatch(f"bias shape {b.shape} does not match {w.shape[1]} columns")
        if self.activation not in (ACTIVATION_IDENTITY, ACTIVATION_RELU):
            raise ValueError(f"unknown activation code {self.activation}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ValueError("weights and biases must be finite")


@dataclass(frozen=True)
class AcousticModel:
    """Dense-layer inference container; the final layer must emit six logits."""

    layers: tuple[DenseLayer, ...]

    def __post_init__(self) -> None:
        if not self.layers:
            raise DimensionMismatch("model has no layers")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.weights.shape[1] != nxt.weights.shape[0]:
                raise DimensionMismatch(
                    f"layer output {prev.weights.shape[1]} feeds layer input {nxt.weights.shape[0]}"
                )
        if self.layers[-1].weights.shape[1] != N_EMOTIONS:
            raise DimensionMismatch(
                f"final layer emits {self.layers[-1].weights.shape[1]} outputs, need {N_EMOTIONS}"
            )

    @property
    def input_dim(self) -> int:
        return self.layers[0].weights.shape[0]


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits)
    exps = np.exp(shifted)
    return exps / exps.sum()


def classify_speech(features: FeatureVector, model: AcousticModel) -> EmotionDistribution:
    """Forward pass through the dense layers, softmax over the final six logits."""
    if model.input_dim != N_COEFFICIENTS:
        raise DimensionMismatch(
            f"model expects {model.input_dim} inputs, features carry {N_COEFFICIENTS}"
        )
    x = features.coefficients.astype(np.float64)
    for layer in model.layers:
        x = x @ layer.weights.astype(np.float64) + layer.biases.astype(np.float64)
        if layer.activation == ACTIVATION_RELU:
            x = np.maximum(x, 0.0)
    return EmotionDistribution.from_values(softmax(x))


def save_acoustic_model(model: AcousticModel) -> bytes:
    """Serialize a model in the binary weight format (see load_acoustic_model)."""
    out = bytearray()
    out += _EMOW_MAGIC
    out += struct.pack("<II", _EMOW_VERSION, len(model.layers))
    for layer in model.layers:
        rows, cols = layer.weights.shape
        out += struct.pack("<III", rows, cols, layer.activation)
        out += layer.weights.astype("<f4").tobytes()
        out += layer.biases.astype("<f4").tobytes()
    return bytes(out)


def load_acoustic_model(data: bytes) -> AcousticModel:
    """Parse the EMOW weight format.

    Layout, all little-endian: magic "EMOW", u32 version (=1), u32 layer
    count, then per layer u32 rows, u32 cols, u32 activation code
    (0=identity, 1=relu), rows*cols f32 weights row-major, cols f32 biases.
    """
    if len(data) < 4 or data[:4] != _EMOW_MAGIC:
        raise BadMagic("not an EMOW weight file")
    if len(data) < 12:
        raise TruncatedFile("header cut short")
    version, layer_count = struct.unpack_from("<II", data, 4)
    if version != _EMOW_VERSION:
        raise VersionUnsupported(f"version {version}, supported: {_EMOW_VERSION}")
    offset = 12
    layers = []
    for _ in range(layer_count):
        if offset + 12 > len(data):
            raise TruncatedFile("layer header cut short")
        rows, cols, activation = struct.unpack_from("<III", data, offset)
        offset += 12
        if rows < 1 or cols < 1:
            raise DimensionMismatch(f"layer with shape ({rows}, {cols})")
        if activation not in (ACTIVATION_IDENTITY, ACTIVATION_RELU):
            raise DimensionMismatch(f"unknown activation code {activation}")
        need = 4 * (rows * cols + cols)
        if offset + need > len(data):
            raise TruncatedFile("layer weights cut short")
        weights = np.frombuffer(data, dtype="<f4", count=rows * cols, offset=offset)
        offset += 4 * rows * cols
        biases = np.frombuffer(data, dtype="<f4", count=cols, offset=offset)
        offset += 4 * cols
        layers.append(
            DenseLayer(weights=weights.reshape(rows, cols), biases=biases, activation=activation)
        )
    if offset != len(data):
        raise DimensionMismatch(f"{len(data) - offset} trailing bytes after last layer")
    return AcousticModel(layers=tuple(layers))


# Heuristic fallback thresholds. The three cues are overall RMS level, the
# spread (standard deviation) of per-frame RMS, and the zero-crossing rate.
HEURISTIC_FRAME_LEN = 400
LOW_RMS = 0.05
LOW_SPREAD = 0.02
HIGH_RMS = 0.30
HIGH_SPREAD = 0.15
HIGH_ZCR = 0.25
_BASE_SCORE = 1.0
_STRONG_BOOST = 3.0
_SECONDARY_BOOST = 2.0
_MILD_BOOST = 1.5


def acoustic_cues(clip: AudioClip) -> tuple[float, float, float]:
    """Return (rms, zero-crossing rate, per-frame RMS spread) for a clip."""
    x = clip.samples
    rms = float(np.sqrt(np.mean(x**2)))
    zcr = float(np.mean(np.signbit(x[1:]) != np.signbit(x[:-1])))
    n_frames = len(x) // HEURISTIC_FRAME_LEN
    frames = x[: n_frames * HEURISTIC_FRAME_LEN].reshape(n_frames, HEURISTIC_FRAME_LEN)
    frame_rms = np.sqrt(np.mean(frames**2, axis=1))
    spread = float(np.std(frame_rms))
    return rms, zcr, spread


def classify_speech_heuristic(clip: AudioClip) -> EmotionDistribution:
    """Deterministic fallback used when no weight file is configured.

    Rules: quiet and steady leans calmness then sadness; loud and bursty
    leans anger then surprise (swapped when the zero-crossing rate is high);
    anything else is mildly peaked on happiness.
    """
    rms, zcr, spread = acoustic_cues(clip)
    scores = np.full(N_EMOTIONS, _BASE_SCORE)
    if rms < LOW_RMS and spread < LOW_SPREAD:
        scores[emotion_index("calmness")] += _STRONG_BOOST
        scores[emotion_index("sadness")] += _SECONDARY_BOOST
    elif rms > HIGH_RMS and spread > HIGH_SPREAD:
        if zcr > HIGH_ZCR:
            scores[emotion_index("surprise")] += _STRONG_BOOST
            scores[emotion_index("anger")] += _SECONDARY_BOOST
        else:
            scores[emotion_index("anger")] += _STRONG_BOOST
            scores[emotion_index("surprise")] += _SECONDARY_BOOST
    else:
        scores[emotion_index("happiness")] += _MILD_BOOST
    return EmotionDistribution.from_values(scores / scores.sum())


# --- text modality ---

EXCLUDED = "excluded"

_PUNCTUATION_TABLE = str.maketrans("", "", string.punctuation)


@dataclass(frozen=True)
class EmotionLexicon:
    """Keyword weights per canonical emotion plus the fine-grained label table."""

    entries: dict[str, tuple[int, float]]
    source_taxonomy: dict[str, int | None]  # None marks an excluded label

    def __post_init__(self) -> None:
        for token, (index, weight) in self.entries.items():
            if token != token.lower():
                raise SchemaViolation(f"lexicon token not lowercase: {token!r}")
            if not 0 <= index < N_EMOTIONS:
                raise SchemaViolation(f"lexicon entry {token!r} has emotion index {index}")
            if not weight > 0:
                raise SchemaViolation(f"lexicon entry {token!r} has non-positive weight")
        for label, index in self.source_taxonomy.items():
            if index is not None and not 0 <= index < N_EMOTIONS:
                raise SchemaViolation(f"taxonomy label {label!r} maps to index {index}")


def load_lexicon(lexicon_doc: dict, taxonomy_doc: dict) -> EmotionLexicon:
    """Build a lexicon from JSON documents.

    Lexicon shape: {token: [emotion_name, weight]}. Taxonomy shape:
    {fine_grained_label: emotion_name | "excluded"}.
    """
    taxonomy: dict[str, int | None] = {}
    for label, target in taxonomy_doc.items():
        if target == EXCLUDED:
            taxonomy[label] = None
        else:
            try:
                taxonomy[label] = emotion_index(target)
            except ValueError as exc:
                raise SchemaViolation(f"taxonomy label {label!r}: {exc}") from None

    entries: dict[str, tuple[int, float]] = {}
    for token, value in lexicon_doc.items():
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise SchemaViolation(f"lexicon entry {token!r} must be [emotion, weight]")
        name, weight = value
        try:
            index = emotion_index(name)
        except ValueError as exc:
            raise SchemaViolation(f"lexicon entry {token!r}: {exc}") from None
        if not isinstance(weight, (int, float)) or not weight > 0:
            raise SchemaViolation(f"lexicon entry {token!r} has bad weight {weight!r}")
        entries[token] = (index, float(weight))
    return EmotionLexicon(entries=entries, source_taxonomy=taxonomy)


def load_lexicon_files(lexicon_path: Path, taxonomy_path: Path) -> EmotionLexicon:
    with open(lexicon_path, encoding="utf-8") as f:
        lexicon_doc = json.load(f)
    with open(taxonomy_path, encoding="utf-8") as f:
        taxonomy_doc = json.load(f)
    return load_lexicon(lexicon_doc, taxonomy_doc)


def tokenize(transcript: str) -> list[str]:
    """Lowercase, strip punctuation characters, split on whitespace."""
    return transcript.lower().translate(_PUNCTUATION_TABLE).split()


def classify_text(transcript: str, lexicon: EmotionLexicon) -> EmotionDistribution:
    """Score a transcript against the lexicon.

    Sums entry weights per emotion over all token occurrences; with no hits
    the result is uniform, otherwise add-one smoothing across the six classes
    keeps single-keyword transcripts from going one-hot.
    """
    totals = [0.0] * N_EMOTIONS
    for token in tokenize(transcript):
        entry = lexicon.entries.get(token)
        if entry is not None:
            index, weight = entry
            totals[index] += weight
    mass = sum(totals)
    if mass == 0.0:
        return EmotionDistribution.uniform()
    denominator = mass + N_EMOTIONS
    return EmotionDistribution.from_values((w + 1.0) / denominator for w in totals)


# --- transcription ---

class TranscriptionClient(Protocol):
    def transcribe(self, clip: AudioClip) -> str: ...


class StaticTranscriptionClient:
    """Returns one fixed transcript for every clip (CLI and request overrides)."""

    def __init__(self, transcript: str):
        self._transcript = transcript

    def transcribe(self, clip: AudioClip) -> str:
        return self._transcript


class MockTranscriptionClient:
    """Returns transcripts preloaded per clip digest; empty string when unknown."""

    def __init__(self, transcripts: dict[str, str]):
        self._transcripts = dict(transcripts)

    @classmethod
    def from_file(cls, path: Path) -> "MockTranscriptionClient":
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        if not isinstance(doc, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in doc.items()
        ):
            raise SchemaViolation("transcript map must be a JSON object of digest -> text")
        return cls(doc)

    def transcribe(self, clip: AudioClip) -> str:
        return self._transcripts.get(clip_digest(clip), "")


def transcribe(clip: AudioClip, client: TranscriptionClient) -> str:
    """Fetch the transcript for a clip from the configured client.

    Client failures must surface as TranscriptionUnavailable; callers fall
    back to speech-only fusion.
    """
    return client.transcribe(clip)


def default_lexicon() -> EmotionLexicon:
    """The bundled lexicon and taxonomy shipped as package data."""
    from importlib.resources import files

    data = files("emorelay").joinpath("data")
    lexicon_doc = json.loads(data.joinpath("lexicon.json").read_text(encoding="utf-8"))
    taxonomy_doc = json.loads(data.joinpath("taxonomy.json").read_text(encoding="utf-8"))
    return load_lexicon(lexicon_doc, taxonomy_doc)
