"""Shared fixtures: synthetic clips, WAV builders, fixture models, and the
acceptance-criterion reporter."""

import struct

import numpy as np
import pytest

from emorelay.audio import AudioClip
from emorelay.classify import AcousticModel, DenseLayer


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        verdict = "PASS" if report.passed else "FAIL"
        line = f"ACCEPTANCE {verdict}: {marker.kwargs.get('name', item.name)}"
        terminal = item.config.pluginmanager.get_plugin("terminalreporter")
        if terminal is not None:
            terminal.write_line(line)


def build_wav(
    pcm: np.ndarray,
    rate: int = 16000,
    channels: int = 1,
) -> bytes:
    """Assemble a RIFF/WAVE byte string from int16 PCM (interleaved if stereo)."""
    data = pcm.astype("<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(data),
        b"WAVE",
        b"fmt ",
        16,
        1,
        channels,
        rate,
        rate * channels * 2,
        channels * 2,
        16,
        b"data",
        len(data),
    )
    return header + data


def sine_clip(freq_hz: float, amplitude: float = 0.1, seconds: float = 1.0) -> AudioClip:
    t = np.arange(int(16000 * seconds)) / 16000.0
    return AudioClip(samples=amplitude * np.sin(2 * np.pi * freq_hz * t))


def silence_clip(seconds: float = 1.0) -> AudioClip:
    return AudioClip(samples=np.zeros(int(16000 * seconds)))


def burst_clip(seconds: float = 1.0) -> AudioClip:
    """Full-scale 100 Hz square wave alternating with silence every 50 ms."""
    n = int(16000 * seconds)
    t = np.arange(n)
    square = np.where((t // 80) % 2 == 0, 1.0, -1.0)
    gate = (t // 800) % 2 == 0
    return AudioClip(samples=np.where(gate, square, 0.0))


def zero_model() -> AcousticModel:
    """Single 40x6 layer of zeros: softmax yields the uniform distribution."""
    return AcousticModel(
        layers=(
            DenseLayer(
                weights=np.zeros((40, 6), dtype=np.float32),
                biases=np.zeros(6, dtype=np.float32),
                activation=0,
            ),
        )
    )


def enumerated_model() -> AcousticModel:
    """Single 40x6 layer with weights 0.001*i enumerated row-major, zero bias."""
    weights = (0.001 * np.arange(240, dtype=np.float32)).reshape(40, 6)
    return AcousticModel(
        layers=(DenseLayer(weights=weights, biases=np.zeros(6, dtype=np.float32), activation=0),)
    )


@pytest.fixture
def tone440():
    return sine_clip(440.0)


@pytest.fixture
def silence():
    return silence_clip()
