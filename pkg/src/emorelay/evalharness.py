"""Classifier evaluation over labeled fixture directories.

A fixture is a <name>.wav / <name>.txt / <name>.label triple. Every sample
runs through the same pipeline the server uses, with the .txt file standing
in for the transcription service; the report carries per-modality accuracy,
per-class precision and recall for the fused prediction, and the 6x6
confusion matrix (rows gold, columns predicted, canonical order).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .audio import parse_wav
from .classify import StaticTranscriptionClient
from .emotions import EMOTIONS, N_EMOTIONS, emotion_index
from .errors import EmptyFixtureSet, SchemaViolation
from .pipeline import EmotionPipeline


@dataclass(frozen=True)
class FixtureSample:
    name: str
    wav_path: Path
    transcript: str
    gold: int


@dataclass
class EvalReport:
    sample_count: int
    accuracy_speech: float
    accuracy_text: float
    accuracy_fused: float
    precision: dict[str, float]  # fused prediction, per class
    recall: dict[str, float]
    support: dict[str, int]
    confusion: list[list[int]]  # rows gold, columns predicted
    samples: list[dict]

    def to_json(self) -> str:
        return json.dumps(
            {
                "sample_count": self.sample_count,
                "emotions": list(EMOTIONS),
                "accuracy": {
                    "speech": self.accuracy_speech,
                    "text": self.accuracy_text,
                    "fused": self.accuracy_fused,
                },
                "per_class": {
                    name: {
                        "precision": self.precision[name],
                        "recall": self.recall[name],
                        "support": self.support[name],
                    }
                    for name in EMOTIONS
                },
                "confusion": self.confusion,
                "samples": self.samples,
            },
            indent=2,
        )


def discover_fixtures(directory: Path) -> list[FixtureSample]:
    directory = Path(directory)
    samples = []
    for wav_path in sorted(directory.glob("*.wav")):
        txt_path = wav_path.with_suffix(".txt")
        label_path = wav_path.with_suffix(".label")
        if not txt_path.exists() or not label_path.exists():
            continue
        label = label_path.read_text(encoding="utf-8").strip()
        try:
            gold = emotion_index(label)
        except ValueError:
            raise SchemaViolation(f"{label_path.name}: unknown emotion {label!r}") from None
        samples.append(
            FixtureSample(
                name=wav_path.stem,
                wav_path=wav_path,
                transcript=txt_path.read_text(encoding="utf-8").strip(),
                gold=gold,
            )
        )
    if not samples:
        raise EmptyFixtureSet(str(directory))
    return samples


def evaluate_fixtures(directory: Path, pipeline: EmotionPipeline) -> EvalReport:
    samples = discover_fixtures(directory)

    confusion = [[0] * N_EMOTIONS for _ in range(N_EMOTIONS)]
    correct = {"speech": 0, "text": 0, "fused": 0}
    rows = []
    for sample in samples:
        clip = parse_wav(sample.wav_path.read_bytes())
        analysis = replace(
            pipeline, transcription=StaticTranscriptionClient(sample.transcript)
        ).analyze(clip)
        assert analysis.p_text is not None  # static client never fails
        pred_speech = analysis.p_speech.argmax()
        pred_text = analysis.p_text.argmax()
        pred_fused = analysis.recommendation.fused.argmax()
        correct["speech"] += pred_speech == sample.gold
        correct["text"] += pred_text == sample.gold
        correct["fused"] += pred_fused == sample.gold
        confusion[sample.gold][pred_fused] += 1
        rows.append(
            {
                "name": sample.name,
                "gold": EMOTIONS[sample.gold],
                "speech": EMOTIONS[pred_speech],
                "text": EMOTIONS[pred_text],
                "fused": EMOTIONS[pred_fused],
            }
        )

    n = len(samples)
    precision, recall, support = {}, {}, {}
    for c, name in enumerate(EMOTIONS):
        predicted_c = sum(confusion[g][c] for g in range(N_EMOTIONS))
        gold_c = sum(confusion[c])
        hit = confusion[c][c]
        precision[name] = hit / predicted_c if predicted_c else 0.0
        recall[name] = hit / gold_c if gold_c else 0.0
        support[name] = gold_c

    return EvalReport(
        sample_count=n,
        accuracy_speech=correct["speech"] / n,
        accuracy_text=correct["text"] / n,
        accuracy_fused=correct["fused"] / n,
        precision=precision,
        recall=recall,
        support=support,
        confusion=confusion,
        samples=rows,
    )


def format_report_table(report: EvalReport) -> str:
    lines = [
        f"samples: {report.sample_count}",
        f"accuracy  speech={report.accuracy_speech:.4f}  "
        f"text={report.accuracy_text:.4f}  fused={report.accuracy_fused:.4f}",
        "",
        f"{'class':<12}{'precision':>10}{'recall':>10}{'support':>10}",
    ]
    for name in EMOTIONS:
        lines.append(
            f"{name:<12}{report.precision[name]:>10.4f}"
            f"{report.recall[name]:>10.4f}{report.support[name]:>10}"
        )
    lines.append("")
    lines.append("confusion (rows gold, cols predicted):")
    header = " " * 12 + "".join(f"{name[:4]:>6}" for name in EMOTIONS)
    lines.append(header)
    for g, name in enumerate(EMOTIONS):
        lines.append(f"{name:<12}" + "".join(f"{v:>6}" for v in report.confusion[g]))
    return "\n".join(lines)
