"""
Feature Extractors

Handcrafted representations computed from a signal (full utterance,
speech-only or non-speech-only): MFCC functionals, spectral sparsity,
log-Mel segments and their time-pooled vectors.

Author: Corpus Audit Team
Date: October 18, 2026
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.config import SAMPLE_RATE, FeatureConfig
from src.core.dsp import (
    StftConfig,
    column_moments,
    dct_ii_orthonormal,
    mel_filterbank,
    ms_to_samples,
    stft_magnitude,
)
from src.core.exceptions import (
    DimensionMismatchError,
    InsufficientDataError,
    NonFiniteFeatureError,
    SignalTooShortError,
)
from src.modules.features.sparsity import sparsity_vector

DEFAULT_FEATURES = FeatureConfig()


class FeatureKind(str, Enum):
    MFCC_STATS = "mfcc_stats"
    SPARSITY = "sparsity"
    MEL_POOLED = "mel_pooled"
    STACK = "stack"


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """A finite feature vector with its kind and provenance."""
    kind: FeatureKind
    values: np.ndarray
    source_id: str = ""
    speaker_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", FeatureKind(self.kind))
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise DimensionMismatchError("feature values must be a vector")
        if not np.all(np.isfinite(values)):
            raise NonFiniteFeatureError(f"{self.kind.value} vector of {self.source_id or 'signal'} is not finite")
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class MelSegment:
    """Mel energies of one 500 ms window, [n_bands, n_frames], nonnegative."""
    energies: np.ndarray
    source_id: str
    index: int
    log_floor: float = DEFAULT_FEATURES.log_floor

    @property
    def log_mel(self) -> np.ndarray:
        return np.log(self.energies + self.log_floor)

    @property
    def shape(self):
        return self.energies.shape


def _mel_energies(signal: np.ndarray, cfg: FeatureConfig) -> np.ndarray:
    """Mel-band energies of the 32 ms / 4 ms STFT, [n_bands, n_frames]."""
    spec = stft_magnitude(signal, StftConfig(cfg.mel_window_ms, cfg.mel_hop_ms))
    return mel_filterbank(spec, cfg.mel_bands, 0.0, SAMPLE_RATE / 2).T


def mfcc_matrix(signal: np.ndarray, cfg: Optional[FeatureConfig] = None) -> np.ndarray:
    """Per-frame cepstral coefficients c1..c12, [n_frames, 12]."""
    cfg = cfg or DEFAULT_FEATURES
    spec = stft_magnitude(signal, StftConfig(cfg.mfcc_window_ms, cfg.mfcc_hop_ms))
    log_mel = np.log(mel_filterbank(spec, cfg.mfcc_n_filters, 0.0, SAMPLE_RATE / 2) + cfg.log_floor)
    cepstra = dct_ii_orthonormal(log_mel, cfg.mfcc_n_coefficients + 1)
    return cepstra[:, 1:]


def mfcc_stats(signal: np.ndarray, source_id: str = "", speaker_id: str = "",
               cfg: Optional[FeatureConfig] = None) -> FeatureVector:
    """
    MFCC functionals: mean, variance, skewness and kurtosis of c1..c12.

    Values are ordered [c1 stats, c2 stats, ...], 48 in total.

    Raises:
        SignalTooShortError: Signal shorter than 64 ms
    """
    cfg = cfg or DEFAULT_FEATURES
    min_samples = ms_to_samples(2 * cfg.mfcc_window_ms)
    if len(signal) < min_samples:
        raise SignalTooShortError(f"MFCC functionals need at least {2 * cfg.mfcc_window_ms:g} ms")
    stats = column_moments(mfcc_matrix(signal, cfg))
    return FeatureVector(FeatureKind.MFCC_STATS, stats.reshape(-1), source_id, speaker_id)


def sparsity_features(signal: np.ndarray, source_id: str = "", speaker_id: str = "",
                      cfg: Optional[FeatureConfig] = None) -> FeatureVector:
    """Per-bin Gamma shape of the 16 ms STFT; 129 values at 16 kHz."""
    return FeatureVector(FeatureKind.SPARSITY, sparsity_vector(signal, cfg), source_id, speaker_id)


def mel_segments(signal: np.ndarray, source_id: str = "", cfg: Optional[FeatureConfig] = None) -> List[MelSegment]:
    """
    Split a signal into 500 ms windows at a 250 ms shift and compute Mel energies.

    Signals shorter than one window are zero-padded into a single segment.

    Raises:
        SignalTooShortError: Empty signal
    """
    cfg = cfg or DEFAULT_FEATURES
    samples = np.asarray(signal, dtype=np.float64)
    if samples.shape[0] == 0:
        raise SignalTooShortError("cannot segment an empty signal")

    length = ms_to_samples(cfg.segment_ms)
    shift = ms_to_samples(cfg.segment_shift_ms)
    if samples.shape[0] < length:
        samples = np.pad(samples, (0, length - samples.shape[0]))

    count = (samples.shape[0] - length) // shift + 1
    return [
        MelSegment(
            energies=_mel_energies(samples[i * shift:i * shift + length], cfg),
            source_id=source_id,
            index=i,
            log_floor=cfg.log_floor,
        )
        for i in range(count)
    ]


def mel_segment_pooled(segment: MelSegment, speaker_id: str = "") -> FeatureVector:
    """Time-mean of one segment's log-Mel matrix."""
    return FeatureVector(
        FeatureKind.MEL_POOLED,
        segment.log_mel.mean(axis=1),
        f"{segment.source_id}#{segment.index}",
        speaker_id,
    )


def mel_pooled(signal: np.ndarray, source_id: str = "", speaker_id: str = "",
               cfg: Optional[FeatureConfig] = None) -> FeatureVector:
    """
    Mean over frames of the whole signal's log-Mel matrix (126 values).

    Raises:
        SignalTooShortError: Signal shorter than one 32 ms window
    """
    cfg = cfg or DEFAULT_FEATURES
    log_mel = np.log(_mel_energies(signal, cfg) + cfg.log_floor)
    return FeatureVector(FeatureKind.MEL_POOLED, log_mel.mean(axis=1), source_id, speaker_id)


def stack_features(signal: np.ndarray, source_id: str = "", speaker_id: str = "",
                   cfg: Optional[FeatureConfig] = None) -> FeatureVector:
    """Concatenation [mfcc_stats | sparsity | mel_pooled], 303 values at 16 kHz."""
    parts = [
        mfcc_stats(signal, cfg=cfg).values,
        sparsity_features(signal, cfg=cfg).values,
        mel_pooled(signal, cfg=cfg).values,
    ]
    return FeatureVector(FeatureKind.STACK, np.concatenate(parts), source_id, speaker_id)


EXTRACTORS = {
    FeatureKind.MFCC_STATS: mfcc_stats,
    FeatureKind.SPARSITY: sparsity_features,
    FeatureKind.MEL_POOLED: mel_pooled,
    FeatureKind.STACK: stack_features,
}


def extract(kind: FeatureKind, signal: np.ndarray, source_id: str = "", speaker_id: str = "",
            cfg: Optional[FeatureConfig] = None) -> FeatureVector:
    return EXTRACTORS[FeatureKind(kind)](signal, source_id=source_id, speaker_id=speaker_id, cfg=cfg)


def feature_matrix(vectors: Sequence[FeatureVector]) -> np.ndarray:
    """Stack vectors into [n, dim], checking that dimensions agree."""
    if not vectors:
        raise InsufficientDataError("no feature vectors to stack")
    dims = {v.dim for v in vectors}
    if len(dims) > 1:
        raise DimensionMismatchError(f"inconsistent feature dimensions: {sorted(dims)}")
    return np.vstack([v.values for v in vectors])


def features_frame(vectors: Sequence[FeatureVector]) -> pd.DataFrame:
    """Tabular view with columns source_id, speaker_id, kind, v0, v1, ..."""
    matrix = feature_matrix(vectors)
    meta: Dict[str, list] = {
        "source_id": [v.source_id for v in vectors],
        "speaker_id": [v.speaker_id for v in vectors],
        "kind": [v.kind.value for v in vectors],
    }
    values = pd.DataFrame(matrix, columns=[f"v{i}" for i in range(matrix.shape[1])])
    return pd.concat([pd.DataFrame(meta), values], axis=1)


def dump_features(vectors: Sequence[FeatureVector], path: str) -> None:
    """Write the feature CSV dump."""
    features_frame(vectors).to_csv(path, index=False, float_format="%.17g")
