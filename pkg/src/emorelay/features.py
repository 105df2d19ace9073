"""MFCC feature extraction: 40 per-file cepstral coefficients per clip.

Transform definition (normative for this package and its weight files):
25 ms / 10 ms Hann-windowed frames with 0.97 pre-emphasis, 512-point power
spectrum, 40 triangular filters spaced uniformly on the mel scale
mel(f) = 2595*log10(1 + f/700) between 0 Hz and Nyquist, natural log with a
relative floor (see below), orthonormal DCT-II keeping coefficients 0..39,
and the element-wise mean over frames as the per-file aggregate.

The log floor is applied per frame at log_floor times the frame's peak
filter energy, falling back to the absolute log_floor for silent frames.
A relative floor scales with the signal, which keeps amplitude gain an
additive constant in the log domain for every filter: scaling a clip moves
only cepstral coefficient 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft

from .audio import AudioClip
from .errors import TooShort

N_COEFFICIENTS = 40


@dataclass(frozen=True)
class FrameSpec:
    """Analysis parameters for the MFCC pipeline."""

    frame_len: int = 400
    hop_len: int = 160
    fft_size: int = 512
    mel_filters: int = 40
    preemphasis: float = 0.97
    log_floor: float = 1e-10  # relative to each frame's peak filter energy

    def __post_init__(self) -> None:
        if self.frame_len <= 0 or self.hop_len <= 0:
            raise ValueError("frame_len and hop_len must be positive")
        if self.fft_size < self.frame_len:
            raise ValueError("fft_size must be >= frame_len")
        if self.fft_size & (self.fft_size - 1):
            raise ValueError("fft_size must be a power of two")
        if self.mel_filters < N_COEFFICIENTS:
            raise ValueError(f"mel_filters must be >= {N_COEFFICIENTS}")
        if not 0.0 <= self.preemphasis < 1.0:
            raise ValueError("preemphasis must lie in [0, 1)")
        if self.log_floor <= 0.0:
            raise ValueError("log_floor must be positive")


@dataclass(frozen=True)
class FeatureVector:
    """Per-file aggregate MFCCs: exactly 40 finite coefficients."""

    coefficients: np.ndarray
    frame_count: int

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coefficients, dtype=np.float64)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        if coeffs.shape != (N_COEFFICIENTS,):
            raise ValueError(f"expected {N_COEFFICIENTS} coefficients, got shape {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        if self.frame_count < 1:
            raise ValueError("frame_count must be >= 1")


def hann_window(length: int) -> np.ndarray:
    """Symmetric Hann window: 0.5 - 0.5*cos(2*pi*n / (N-1))."""
    n = np.arange(length, dtype=np.float64)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / (length - 1))


def preemphasize(samples: np.ndarray, coefficient: float) -> np.ndarray:
    """First-order pre-emphasis y[n] = x[n] - a*x[n-1] with y[0] = x[0]."""
    x = np.asarray(samples, dtype=np.float64)
    return np.concatenate(([x[0]], x[1:] - coefficient * x[:-1]))


def frame_signal(clip: AudioClip, spec: FrameSpec = FrameSpec()) -> np.ndarray:
    """Slice a clip into overlapping Hann-windowed frames.

    Pre-emphasis is applied first; any trailing partial frame is discarded.
    Returns an (n_frames, frame_len) array.
    """
    emphasized = preemphasize(clip.samples, spec.preemphasis)
    n = len(emphasized)
    if n < spec.frame_len:
        raise TooShort(f"{n} samples; need at least {spec.frame_len} for one frame")
    n_frames = (n - spec.frame_len) // spec.hop_len + 1
    starts = np.arange(n_frames) * spec.hop_len
    frames = emphasized[starts[:, None] + np.arange(spec.frame_len)]
    return frames * hann_window(spec.frame_len)


def _power_spectra(frames: np.ndarray, fft_size: int) -> np.ndarray:
    padded = np.zeros((frames.shape[0], fft_size), dtype=np.float64)
    padded[:, : frames.shape[1]] = frames
    spectrum = np.fft.rfft(padded, n=fft_size, axis=1)
    return (spectrum.real**2 + spectrum.imag**2) / fft_size


def power_spectrum(frame: np.ndarray, fft_size: int) -> np.ndarray:
    """|DFT|^2 / fft_size for bins 0..fft_size/2 of a zero-padded frame."""
    frame = np.asarray(frame, dtype=np.float64)
    if len(frame) > fft_size:
        raise ValueError("frame longer than fft_size")
    return _power_spectra(frame[None, :], fft_size)[0]


def hz_to_mel(f: np.ndarray | float) -> np.ndarray | float:
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m: np.ndarray | float) -> np.ndarray | float:
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=8)
def mel_filterbank(spec: FrameSpec, sample_rate_hz: int) -> np.ndarray:
    """Triangular filterbank matrix of shape (mel_filters, fft_size/2 + 1).

    Filter centers are spaced uniformly on the mel scale between 0 Hz and
    Nyquist; each filter is a unit-peak triangle evaluated at the FFT bin
    frequencies (no bin quantization).
    """
    n_bins = spec.fft_size // 2 + 1
    bin_freqs = np.arange(n_bins, dtype=np.float64) * sample_rate_hz / spec.fft_size
    mel_points = np.linspace(0.0, hz_to_mel(sample_rate_hz / 2.0), spec.mel_filters + 2)
    hz_points = np.asarray(mel_to_hz(mel_points))

    weights = np.zeros((spec.mel_filters, n_bins), dtype=np.float64)
    for m in range(1, spec.mel_filters + 1):
        left, center, right = hz_points[m - 1], hz_points[m], hz_points[m + 1]
        rising = (bin_freqs - left) / (center - left)
        falling = (right - bin_freqs) / (right - center)
        weights[m - 1] = np.maximum(0.0, np.minimum(rising, falling))
    weights.setflags(write=False)
    return weights


def mel_filterbank_energies(
    spectrum: np.ndarray, spec: FrameSpec, sample_rate_hz: int
) -> np.ndarray:
    """Per-filter weighted sums of a power spectrum."""
    spectrum = np.asarray(spectrum, dtype=np.float64)
    n_bins = spec.fft_size // 2 + 1
    if spectrum.shape != (n_bins,):
        raise ValueError(f"expected spectrum of {n_bins} bins, got {spectrum.shape}")
    return mel_filterbank(spec, sample_rate_hz) @ spectrum


def floor_energies(energies: np.ndarray, log_floor: float) -> np.ndarray:
    """Apply the per-frame relative floor to an (n_frames, n_filters) array."""
    peaks = energies.max(axis=1, keepdims=True)
    floors = np.where(peaks > 0.0, log_floor * peaks, log_floor)
    return np.maximum(energies, floors)


def mfcc(clip: AudioClip, spec: FrameSpec = FrameSpec()) -> FeatureVector:
    """Compute the 40-coefficient per-file MFCC summary of a clip."""
    frames = frame_signal(clip, spec)
    spectra = _power_spectra(frames, spec.fft_size)
    energies = spectra @ mel_filterbank(spec, clip.sample_rate_hz).T
    log_energies = np.log(floor_energies(energies, spec.log_floor))
    cepstra = scipy.fft.dct(log_energies, type=2, norm="ortho", axis=1)[:, :N_COEFFICIENTS]
    return FeatureVector(coefficients=cepstra.mean(axis=0), frame_count=frames.shape[0])
