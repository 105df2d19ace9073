"""Independent brute-force reference implementations used only by tests.

Everything here recomputes results from definitions (naive DFT matrix,
explicit triangle construction, explicit DCT-II cosine matrix) without
touching the package's FFT-based pipeline.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=4)
def naive_dft_matrix(n: int) -> np.ndarray:
    # cached construction; applying it stays an O(n^2) matrix multiply
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    return np.exp(-2j * np.pi * k * m / n)


def naive_power_spectrum(frame: np.ndarray, fft_size: int) -> np.ndarray:
    """|DFT|^2 / fft_size for bins 0..fft_size/2, via the explicit DFT matrix."""
    padded = np.zeros(fft_size)
    padded[: len(frame)] = frame
    spectrum = naive_dft_matrix(fft_size) @ padded
    power = (np.abs(spectrum) ** 2) / fft_size
    return power[: fft_size // 2 + 1]


def naive_mel_filterbank(n_filters: int, fft_size: int, sample_rate: int) -> np.ndarray:
    """Scalar-loop triangle construction on the mel scale."""

    def to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    edges_mel = [to_mel(0.0) + i * (to_mel(sample_rate / 2) - to_mel(0.0)) / (n_filters + 1)
                 for i in range(n_filters + 2)]
    edges_hz = [to_hz(m) for m in edges_mel]
    n_bins = fft_size // 2 + 1
    bank = np.zeros((n_filters, n_bins))
    for m in range(1, n_filters + 1):
        left, center, right = edges_hz[m - 1], edges_hz[m], edges_hz[m + 1]
        for k in range(n_bins):
            f = k * sample_rate / fft_size
            if left <= f <= center:
                bank[m - 1, k] = (f - left) / (center - left)
            elif center < f <= right:
                bank[m - 1, k] = (right - f) / (right - center)
    return bank


def naive_dct2_ortho_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis: row k is s_k * cos(pi*k*(2m+1) / (2n))."""
    matrix = np.zeros((n, n))
    for k in range(n):
        scale = np.sqrt(1.0 / n) if k == 0 else np.sqrt(2.0 / n)
        for m in range(n):
            matrix[k, m] = scale * np.cos(np.pi * k * (2 * m + 1) / (2 * n))
    return matrix


def hann(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / (n - 1))


def oracle_mfcc(samples: np.ndarray, sample_rate: int = 16000, frame_len: int = 400,
                hop_len: int = 160, fft_size: int = 512, n_filters: int = 40,
                preemphasis: float = 0.97, log_floor: float = 1e-10,
                n_coefficients: int = 40) -> np.ndarray:
    """End-to-end brute-force MFCC: naive DFT + explicit filterbank + naive DCT."""
    x = np.asarray(samples, dtype=np.float64)
    emphasized = np.concatenate(([x[0]], x[1:] - preemphasis * x[:-1]))
    n_frames = (len(emphasized) - frame_len) // hop_len + 1
    window = hann(frame_len)
    bank = naive_mel_filterbank(n_filters, fft_size, sample_rate)
    dct_matrix = naive_dct2_ortho_matrix(n_filters)

    per_frame = np.zeros((n_frames, n_coefficients))
    for i in range(n_frames):
        frame = emphasized[i * hop_len : i * hop_len + frame_len] * window
        power = naive_power_spectrum(frame, fft_size)
        energies = bank @ power
        # floor relative to the frame peak; absolute floor on silent frames
        peak = energies.max()
        floor = log_floor * peak if peak > 0.0 else log_floor
        logs = np.log(np.maximum(energies, floor))
        per_frame[i] = (dct_matrix @ logs)[:n_coefficients]
    return per_frame.mean(axis=0)
