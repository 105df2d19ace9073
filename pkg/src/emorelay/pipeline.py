"""The classify-and-recommend pipeline shared by the relay server and the CLI.

One clip goes through: MFCC features -> acoustic distribution (weights file
or heuristic fallback) -> transcript -> text distribution -> decision-level
fusion -> display ordering. A transcription failure degrades to the
speech-only path instead of erroring the request.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeoutError
from dataclasses import dataclass, field

from .audio import AudioClip
from .classify import (
    AcousticModel,
    EmotionLexicon,
    TranscriptionClient,
    classify_speech,
    classify_speech_heuristic,
    classify_text,
    default_lexicon,
    transcribe,
)
from .emotions import EmotionDistribution
from .errors import TranscriptionUnavailable
from .features import FrameSpec, mfcc
from .fusion import (
    MODALITY_FUSED,
    MODALITY_SPEECH_ONLY,
    FusionWeights,
    Recommendation,
    fuse,
    fuse_speech_only,
    recommend,
)

DEFAULT_TRANSCRIBE_TIMEOUT_S = 10.0


@dataclass
class AnalysisResult:
    """Everything the pipeline learned about one clip."""

    recommendation: Recommendation
    modality: str  # "fused" or "speech-only"
    p_speech: EmotionDistribution
    p_text: EmotionDistribution | None
    transcript: str | None
    feature_summary: dict


@dataclass
class EmotionPipeline:
    """Immutable bundle of the models and settings one deployment runs with."""

    lexicon: EmotionLexicon = field(default_factory=default_lexicon)
    model: AcousticModel | None = None
    transcription: TranscriptionClient | None = None
    weights: FusionWeights = field(default_factory=FusionWeights)
    frame_spec: FrameSpec = field(default_factory=FrameSpec)
    transcribe_timeout_s: float = DEFAULT_TRANSCRIBE_TIMEOUT_S

    def analyze(self, clip: AudioClip) -> AnalysisResult:
        features = mfcc(clip, self.frame_spec)
        if self.model is not None:
            p_speech = classify_speech(features, self.model)
        else:
            p_speech = classify_speech_heuristic(clip)

        transcript: str | None
        p_text: EmotionDistribution | None
        try:
            transcript = self._transcript(clip)
            p_text = classify_text(transcript, self.lexicon)
            fused = fuse(p_speech, p_text, self.weights)
            modality = MODALITY_FUSED
        except TranscriptionUnavailable:
            transcript = None
            p_text = None
            fused = fuse_speech_only(p_speech)
            modality = MODALITY_SPEECH_ONLY

        return AnalysisResult(
            recommendation=recommend(fused),
            modality=modality,
            p_speech=p_speech,
            p_text=p_text,
            transcript=transcript,
            feature_summary={
                "frame_count": features.frame_count,
                "coefficients": [float(c) for c in features.coefficients],
            },
        )

    def _transcript(self, clip: AudioClip) -> str:
        if self.transcription is None:
            raise TranscriptionUnavailable("no transcription client configured")
        # A stuck external service must not stall the upload path, so the
        # call runs on a worker thread that is abandoned on timeout.
        pool = ThreadPoolExecutor(max_workers=1)
        try:
            future = pool.submit(transcribe, clip, self.transcription)
            try:
                return future.result(timeout=self.transcribe_timeout_s)
            except FutureTimeoutError:
                raise TranscriptionUnavailable(
                    f"transcription exceeded {self.transcribe_timeout_s}s"
                ) from None
            except TranscriptionUnavailable:
                raise
            except Exception as exc:
                raise TranscriptionUnavailable(str(exc)) from exc
        finally:
            pool.shutdown(wait=False, cancel_futures=False)
