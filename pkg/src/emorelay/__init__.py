"""Voice-message relay with pre-retrieval emotion teasers."""

__version__ = "0.1.0"

from .audio import AudioClip, clip_digest, encode_wav, parse_wav
from .emotions import EMOTIONS, EmotionDistribution
from .features import FeatureVector, FrameSpec, mfcc
from .fusion import FusionWeights, Recommendation, fuse, recommend

__all__ = [
    "AudioClip",
    "EMOTIONS",
    "EmotionDistribution",
    "FeatureVector",
    "FrameSpec",
    "FusionWeights",
    "Recommendation",
    "clip_digest",
    "encode_wav",
    "fuse",
    "mfcc",
    "parse_wav",
    "recommend",
]
