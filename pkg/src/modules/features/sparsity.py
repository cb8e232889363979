"""
Spectral Sparsity Features

Per-frequency-bin shape of the spectral magnitude distribution. The
Chi/Nakagami magnitude shape is estimated in the power domain as the
maximum-likelihood shape of a Gamma(k, theta) fit to squared magnitudes:
smaller k means a sparser, more peaky bin.

Author: Corpus Audit Team
Date: October 18, 2026
"""

from typing import Optional

import numpy as np
from scipy.special import digamma, polygamma

from src.config import FeatureConfig
from src.core.dsp import StftConfig, stft_magnitude
from src.core.exceptions import InsufficientDataError, SignalTooShortError

SHAPE_MIN = 1e-3
SHAPE_MAX = 1e4
POWER_FLOOR = 1e-12
MIN_VALUES = 8
NEWTON_TOL = 1e-8
NEWTON_MAX_ITER = 50
DEGENERATE_SPREAD = 1e-10


def gamma_shape_mle_columns(powers: np.ndarray) -> np.ndarray:
    """
    Gamma shape MLE for every column of a [n_values, n_columns] matrix.

    Greenwood-Durand style initialisation followed by Newton steps on
    ln k - digamma(k) - s = 0, with s = ln(mean p) - mean(ln p).
    """
    data = np.maximum(np.asarray(powers, dtype=np.float64), POWER_FLOOR)
    if data.ndim == 1:
        data = data[:, np.newaxis]
    if data.shape[0] < MIN_VALUES:
        raise InsufficientDataError(f"Gamma shape MLE needs at least {MIN_VALUES} values, got {data.shape[0]}")

    spread = np.log(np.mean(data, axis=0)) - np.mean(np.log(data), axis=0)
    degenerate = spread < DEGENERATE_SPREAD
    s = np.where(degenerate, 1.0, spread)

    k = (3.0 - s + np.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(NEWTON_MAX_ITER):
        f = np.log(k) - digamma(k) - s
        f_prime = 1.0 / k - polygamma(1, k)
        k_next = k - f / f_prime
        k_next = np.where(k_next > 0, k_next, k / 2.0)
        step = np.abs(k_next - k)
        k = k_next
        if np.all(step < NEWTON_TOL):
            break

    k = np.clip(k, SHAPE_MIN, SHAPE_MAX)
    return np.where(degenerate, SHAPE_MAX, k)


def gamma_shape_mle(powers: np.ndarray) -> float:
    """
    Maximum-likelihood Gamma shape of positive values (floored at 1e-12).

    Returns:
        k clamped to [1e-3, 1e4]; constant input returns 1e4

    Raises:
        InsufficientDataError: Fewer than 8 values
    """
    values = np.asarray(powers, dtype=np.float64).ravel()
    return float(gamma_shape_mle_columns(values[:, np.newaxis])[0])


def sparsity_vector(signal: np.ndarray, cfg: Optional[FeatureConfig] = None) -> np.ndarray:
    """Shape estimate per STFT bin (16 ms window / 8 ms hop) across frames."""
    cfg = cfg or FeatureConfig()
    stft_cfg = StftConfig(cfg.sparsity_window_ms, cfg.sparsity_hop_ms)
    spec = stft_magnitude(signal, stft_cfg)
    if spec.n_frames < MIN_VALUES:
        raise SignalTooShortError(
            f"sparsity features need {MIN_VALUES} frames "
            f"({cfg.sparsity_window_ms + (MIN_VALUES - 1) * cfg.sparsity_hop_ms:g} ms), got {spec.n_frames}"
        )
    return gamma_shape_mle_columns(spec.magnitudes ** 2)
