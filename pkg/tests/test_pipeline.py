"""Pipeline composition: modality selection, fallback, timeout, and the
one-pipeline guarantee between the CLI and the service."""

import json
import time

import pytest
from click.testing import CliRunner
from starlette.testclient import TestClient

from emorelay.classify import StaticTranscriptionClient, save_acoustic_model
from emorelay.cli import main
from emorelay.config import ServiceConfig
from emorelay.emotions import EMOTIONS
from emorelay.pipeline import EmotionPipeline
from emorelay.service.app import create_app

from .conftest import silence_clip, sine_clip, zero_model


class SlowClient:
    def __init__(self, delay_s: float, transcript="late"):
        self.delay_s = delay_s
        self.transcript = transcript

    def transcribe(self, clip):
        time.sleep(self.delay_s)
        return self.transcript


class CrashingClient:
    def transcribe(self, clip):
        raise ConnectionError("socket dropped")


class TestAnalyze:
    def test_fused_flow_with_model_and_transcript(self):
        pipeline = EmotionPipeline(
            model=zero_model(), transcription=StaticTranscriptionClient("I am so happy")
        )
        analysis = pipeline.analyze(sine_clip(440.0, amplitude=0.2))
        assert analysis.modality == "fused"
        assert analysis.transcript == "I am so happy"
        assert analysis.p_text is not None
        # uniform speech + happiness-peaked text keeps happiness on top;
        # hand computation: 1/3 * 1/6 + 2/3 * 2/7 versus 1/3 * 1/6 + 2/3 * 1/7
        assert EMOTIONS[analysis.recommendation.order[0]] == "happiness"
        fused = analysis.recommendation.fused.probs
        assert fused[0] == pytest.approx(1 / 18 + 4 / 21, abs=1e-12)
        for other in fused[1:]:
            assert other == pytest.approx(1 / 18 + 2 / 21, abs=1e-12)

    def test_no_client_means_speech_only(self):
        analysis = EmotionPipeline().analyze(silence_clip())
        assert analysis.modality == "speech-only"
        assert analysis.transcript is None
        assert analysis.p_text is None
        assert analysis.recommendation.fused == analysis.p_speech

    def test_heuristic_used_without_model(self):
        analysis = EmotionPipeline(transcription=StaticTranscriptionClient("")).analyze(
            silence_clip()
        )
        assert analysis.modality == "fused"
        assert EMOTIONS[analysis.p_speech.argmax()] == "calmness"
        # empty transcript scores no keywords: text side is uniform
        assert analysis.p_text is not None
        assert analysis.p_text.probs == pytest.approx((1 / 6,) * 6)

    def test_slow_transcription_times_out_to_speech_only(self):
        pipeline = EmotionPipeline(
            transcription=SlowClient(delay_s=2.0), transcribe_timeout_s=0.1
        )
        started = time.monotonic()
        analysis = pipeline.analyze(silence_clip())
        elapsed = time.monotonic() - started
        assert analysis.modality == "speech-only"
        assert elapsed < 1.5

    def test_crashing_client_degrades_to_speech_only(self):
        pipeline = EmotionPipeline(transcription=CrashingClient())
        analysis = pipeline.analyze(silence_clip())
        assert analysis.modality == "speech-only"

    def test_feature_summary_carries_40_coefficients(self):
        analysis = EmotionPipeline().analyze(sine_clip(440.0))
        assert len(analysis.feature_summary["coefficients"]) == 40
        assert analysis.feature_summary["frame_count"] == 98


class TestOnePipelineTwoEntryPoints:
    def test_cli_and_service_agree_exactly(self, tmp_path):
        import numpy as np

        from .conftest import build_wav

        t = np.arange(16000) / 16000.0
        wav_bytes = build_wav(
            np.round(32767 * 0.2 * np.sin(2 * np.pi * 440 * t)).astype(np.int16)
        )
        wav_path = tmp_path / "tone.wav"
        wav_path.write_bytes(wav_bytes)
        model_path = tmp_path / "model.emow"
        model_path.write_bytes(save_acoustic_model(zero_model()))

        result = CliRunner().invoke(
            main,
            [
                "classify",
                str(wav_path),
                "--model-path",
                str(model_path),
                "--transcript",
                "so happy",
            ],
        )
        assert result.exit_code == 0, result.output
        cli_report = json.loads(result.stdout)

        app = create_app(ServiceConfig(model_path=model_path, storage_dir=tmp_path / "data"))
        with TestClient(app) as client:
            reply = client.post(
                "/classify",
                files={"file": ("tone.wav", wav_bytes, "audio/wav")},
                data={"transcript": "so happy"},
            )
        assert reply.status_code == 200
        assert reply.json() == cli_report
