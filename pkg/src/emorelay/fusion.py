"""Decision-level fusion of the two modality distributions and the teaser ordering.

The fused vector is a weighted sum of the speech and text probability
vectors with the weights normalized to sum one, so it is itself a
distribution. The recommendation puts the two most probable emotions first
and lists the remaining four in canonical order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .emotions import N_EMOTIONS, EmotionDistribution

MODALITY_FUSED = "fused"
MODALITY_SPEECH_ONLY = "speech-only"

# Speech-to-text weighting of 1:2 is the shipped default.
DEFAULT_W_SPEECH = 1.0
DEFAULT_W_TEXT = 2.0


@dataclass(frozen=True)
class FusionWeights:
    w_speech: float = DEFAULT_W_SPEECH
    w_text: float = DEFAULT_W_TEXT

    def __post_init__(self) -> None:
        if self.w_speech < 0 or self.w_text < 0:
            raise ValueError("fusion weights must be non-negative")
        if self.w_speech + self.w_text <= 0:
            raise ValueError("fusion weights must not both be zero")

    def normalized(self) -> tuple[float, float]:
        total = self.w_speech + self.w_text
        return self.w_speech / total, self.w_text / total


@dataclass(frozen=True)
class Recommendation:
    """Fused distribution plus the display order handed to the sender."""

    fused: EmotionDistribution
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.order) != list(range(N_EMOTIONS)):
            raise ValueError(f"order is not a permutation of 0..{N_EMOTIONS - 1}: {self.order}")
        probs = self.fused.probs
        rest_max = max(probs[i] for i in self.order[2:])
        if not (probs[self.order[0]] >= probs[self.order[1]] >= rest_max):
            raise ValueError("top two entries are not the two most probable emotions")
        if list(self.order[2:]) != sorted(self.order[2:]):
            raise ValueError("trailing emotions must stay in canonical order")

    @property
    def top_two(self) -> tuple[int, int]:
        return self.order[0], self.order[1]


def fuse(
    p_speech: EmotionDistribution,
    p_text: EmotionDistribution,
    weights: FusionWeights = FusionWeights(),
) -> EmotionDistribution:
    """Weighted sum of the two modality distributions with normalized weights."""
    w_s, w_t = weights.normalized()
    return EmotionDistribution.from_values(
        w_s * s + w_t * t for s, t in zip(p_speech.probs, p_text.probs)
    )


def fuse_speech_only(p_speech: EmotionDistribution) -> EmotionDistribution:
    """Fallback when no transcript is available: the speech vector passes through."""
    return p_speech


def recommend(fused: EmotionDistribution) -> Recommendation:
    """Order the six emotions for display: two most probable first, rest canonical.

    Ties break toward the lower canonical index, so the ordering is
    deterministic for any input.
    """
    by_probability = sorted(range(N_EMOTIONS), key=lambda i: (-fused.probs[i], i))
    top_two = by_probability[:2]
    rest = sorted(i for i in range(N_EMOTIONS) if i not in top_two)
    return Recommendation(fused=fused, order=tuple(top_two + rest))
