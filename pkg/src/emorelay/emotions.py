"""Canonical emotion labels, their fixed system-wide order, and probability vectors over them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

EMOTIONS: tuple[str, ...] = (
    "happiness",
    "sadness",
    "surprise",
    "calmness",
    "fear",
    "anger",
)

N_EMOTIONS = len(EMOTIONS)

_INDEX = {name: i for i, name in enumerate(EMOTIONS)}


def emotion_index(name: str) -> int:
    """Return the canonical index of an emotion label.

    Raises ValueError for labels outside the six canonical emotions.
    """
    try:
        return _INDEX[name]
    except KeyError:
        raise ValueError(f"unknown emotion: {name!r}") from None


def is_emotion(name: str) -> bool:
    return name in _INDEX


_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EmotionDistribution:
    """Probability vector over the six canonical emotions, in canonical order."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) != N_EMOTIONS:
            raise ValueError(f"expected {N_EMOTIONS} probabilities, got {len(probs)}")
        for p in probs:
            if not math.isfinite(p) or p < 0.0 or p > 1.0:
                raise ValueError(f"probability out of range: {p!r}")
        if abs(sum(probs) - 1.0) > _SUM_TOLERANCE:
            raise ValueError(f"probabilities sum to {sum(probs)!r}, not 1")

    @classmethod
    def uniform(cls) -> "EmotionDistribution":
        return cls(probs=(1.0 / N_EMOTIONS,) * N_EMOTIONS)

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "EmotionDistribution":
        return cls(probs=tuple(float(v) for v in values))

    def argmax(self) -> int:
        """Index of the most probable emotion; ties break toward the lower index."""
        return max(range(N_EMOTIONS), key=lambda i: (self.probs[i], -i))
