"""
Signal Processing Kernels

Deterministic building blocks shared by segmentation and feature extraction:
framing, Hamming-windowed STFT magnitudes, the Mel filterbank, the
orthonormal DCT-II and the four statistical moments.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import librosa
import numpy as np
from scipy import fft as sp_fft
from scipy import stats

from src.config import SAMPLE_RATE
from src.core.exceptions import (
    DimensionMismatchError,
    FrequencyRangeError,
    InsufficientDataError,
    SignalTooShortError,
)

DEGENERATE_VARIANCE = 1e-12


def ms_to_samples(ms: float) -> int:
    return int(round(ms * SAMPLE_RATE / 1000.0))


def next_power_of_two(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


@dataclass(frozen=True)
class StftConfig:
    """Window length and hop in milliseconds; the window is always Hamming."""
    window_len_ms: float
    hop_ms: float
    window: str = "hamming"

    def __post_init__(self):
        if self.window != "hamming":
            raise ValueError(f"Unsupported window: {self.window}")
        if not 0 < self.hop_ms <= self.window_len_ms:
            raise ValueError("hop_ms must lie in (0, window_len_ms]")
        if self.win_length < 2:
            raise ValueError("window must span at least 2 samples")

    @property
    def win_length(self) -> int:
        return ms_to_samples(self.window_len_ms)

    @property
    def hop_length(self) -> int:
        return max(ms_to_samples(self.hop_ms), 1)

    @property
    def n_fft(self) -> int:
        return next_power_of_two(self.win_length)


@dataclass(frozen=True)
class Spectrogram:
    """One-sided STFT magnitudes, frames along the first axis."""
    magnitudes: np.ndarray
    bin_hz: float
    frame_times: np.ndarray
    n_fft: int

    @property
    def n_frames(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def n_bins(self) -> int:
        return self.magnitudes.shape[1]


def frame_signal(samples: np.ndarray, frame_length: int, hop_length: int) -> np.ndarray:
    """
    Slice a signal into full frames; a trailing partial frame is dropped.

    Returns:
        Array of shape [n_frames, frame_length]
    """
    x = np.ascontiguousarray(samples, dtype=np.float64)
    if x.shape[0] < frame_length:
        raise SignalTooShortError(f"signal of {x.shape[0]} samples is shorter than one {frame_length}-sample frame")
    return librosa.util.frame(x, frame_length=frame_length, hop_length=hop_length, axis=0)


def frame_powers(samples: np.ndarray, frame_length: int, hop_length: int) -> np.ndarray:
    """Mean squared amplitude of each full frame."""
    frames = frame_signal(samples, frame_length, hop_length)
    return np.mean(frames ** 2, axis=1)


def stft_magnitude(samples: np.ndarray, cfg: StftConfig) -> Spectrogram:
    """
    Magnitude STFT of Hamming-windowed frames.

    Frames = floor((len - win) / hop) + 1, FFT size is the next power of two
    at or above the window length (zero-padded), bins = n_fft / 2 + 1.

    Args:
        samples: Mono signal
        cfg: Window and hop settings

    Returns:
        Spectrogram with frame start times in seconds

    Raises:
        SignalTooShortError: If the input is shorter than one window
    """
    frames = frame_signal(samples, cfg.win_length, cfg.hop_length)
    window = np.hamming(cfg.win_length)
    magnitudes = np.abs(np.fft.rfft(frames * window, n=cfg.n_fft, axis=1))
    frame_times = np.arange(frames.shape[0]) * cfg.hop_length / SAMPLE_RATE
    return Spectrogram(
        magnitudes=magnitudes,
        bin_hz=SAMPLE_RATE / cfg.n_fft,
        frame_times=frame_times,
        n_fft=cfg.n_fft,
    )


@lru_cache(maxsize=32)
def mel_weights(n_fft: int, n_mels: int, fmin: float, fmax: float) -> np.ndarray:
    """
    Triangular filters uniform on mel(f) = 2595 log10(1 + f / 700).

    Returns:
        Read-only matrix of shape [n_mels, n_fft / 2 + 1]
    """
    if n_mels < 1:
        raise FrequencyRangeError("n_mels must be at least 1")
    if not 0.0 <= fmin < fmax <= SAMPLE_RATE / 2:
        raise FrequencyRangeError(f"invalid Mel range [{fmin}, {fmax}] Hz")
    # narrow low-frequency filters may fall between FFT bins at large n_mels
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*Empty filters.*")
        weights = librosa.filters.mel(
            sr=SAMPLE_RATE,
            n_fft=n_fft,
            n_mels=n_mels,
            fmin=fmin,
            fmax=fmax,
            htk=True,
            norm=None,
            dtype=np.float64,
        )
    weights.setflags(write=False)
    return weights


def mel_filterbank(spec: Spectrogram, n_mels: int, fmin: float = 0.0, fmax: float = SAMPLE_RATE / 2) -> np.ndarray:
    """
    Filter-weighted sums of spectrogram magnitudes.

    Returns:
        Nonnegative matrix [n_frames, n_mels]

    Raises:
        FrequencyRangeError: If n_mels < 1 or the range is not 0 <= fmin < fmax <= 8000
    """
    weights = mel_weights(spec.n_fft, int(n_mels), float(fmin), float(fmax))
    return spec.magnitudes @ weights.T


def dct_ii_orthonormal(x: np.ndarray, n_out: int) -> np.ndarray:
    """First n_out coefficients of the orthonormal DCT-II along the last axis."""
    values = np.asarray(x, dtype=np.float64)
    if n_out > values.shape[-1]:
        raise DimensionMismatchError(f"n_out={n_out} exceeds input length {values.shape[-1]}")
    return sp_fft.dct(values, type=2, norm="ortho", axis=-1)[..., :n_out]


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix D with D @ x equal to the transform of x."""
    return sp_fft.dct(np.eye(n), type=2, norm="ortho", axis=0)


def moment_stats(series: np.ndarray) -> Tuple[float, float, float, float]:
    """
    Population mean, variance, skewness and non-excess kurtosis.

    Skewness and kurtosis are 0 when the variance is below 1e-12.

    Raises:
        InsufficientDataError: For fewer than 2 values
    """
    values = np.asarray(series, dtype=np.float64).ravel()
    if values.shape[0] < 2:
        raise InsufficientDataError("moment statistics need at least 2 values")
    stats_row = column_moments(values[:, np.newaxis])[0]
    return tuple(float(v) for v in stats_row)


def column_moments(matrix: np.ndarray) -> np.ndarray:
    """
    moment_stats applied to every column of a [n_rows, n_cols] matrix.

    Returns:
        Array [n_cols, 4] of (mean, variance, skewness, kurtosis)
    """
    data = np.asarray(matrix, dtype=np.float64)
    if data.shape[0] < 2:
        raise InsufficientDataError("moment statistics need at least 2 rows")
    mean = data.mean(axis=0)
    variance = data.var(axis=0)
    flat = variance < DEGENERATE_VARIANCE
    with np.errstate(divide="ignore", invalid="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        skewness = stats.skew(data, axis=0, bias=True)
        kurtosis = stats.kurtosis(data, axis=0, fisher=False, bias=True)
    skewness = np.where(flat, 0.0, skewness)
    kurtosis = np.where(flat, 0.0, kurtosis)
    return np.column_stack([mean, variance, skewness, kurtosis])
