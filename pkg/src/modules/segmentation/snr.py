"""
Utterance-Level SNR Estimation

Two training-free estimators over 32 ms / 16 ms frame powers:

- ``percentile``: noise power is the mean of the lowest-quintile frames,
  active power the mean of frames above twice that level.
- ``energy_split``: frames above 1% of the mean frame power are speech,
  the rest noise; SNR is their power ratio.

Both clamp to [-20, 60] dB.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.config import SnrConfig, VadConfig
from src.core.dsp import frame_powers, ms_to_samples
from src.core.exceptions import EmptyGroupError, SignalTooShortError
from src.modules.corpus.models import Corpus, Group, Utterance
from src.modules.segmentation.models import SnrEstimate

SNR_METHODS = ("percentile", "energy_split")


@dataclass(frozen=True)
class GroupSnrStats:
    group: Group
    mean_db: float
    std_db: float
    n_utterances: int


def _clamp(value: float, bounds: Tuple[float, float]) -> float:
    low, high = bounds
    return float(min(max(value, low), high))


def _frame_powers(utt: Utterance) -> np.ndarray:
    vad = VadConfig()
    frame_length = ms_to_samples(vad.frame_ms)
    if utt.n_samples < 2 * frame_length:
        raise SignalTooShortError(f"{utt.utterance_id}: SNR estimation needs at least {2 * vad.frame_ms:g} ms")
    return frame_powers(utt.samples, frame_length, ms_to_samples(vad.hop_ms))


def _percentile_snr(powers: np.ndarray, cfg: SnrConfig) -> SnrEstimate:
    low, high = cfg.clamp_db
    n_noise = max(1, int(cfg.noise_fraction * powers.shape[0]))
    if not np.any(powers > 0):
        return SnrEstimate(snr_db=low, n_noise_frames=n_noise, n_active_frames=0)

    noise_power = float(np.mean(np.sort(powers)[:n_noise]))
    if noise_power <= 0:
        return SnrEstimate(snr_db=high, n_noise_frames=n_noise, n_active_frames=int(np.sum(powers > 0)))

    active = powers > cfg.active_factor * noise_power
    if not np.any(active):
        # speech buried below the activity factor; fall back to the louder half
        active = powers > np.median(powers)
    if not np.any(active):
        return SnrEstimate(snr_db=low, n_noise_frames=n_noise, n_active_frames=0)

    active_power = float(np.mean(powers[active]))
    snr_db = 10.0 * math.log10(max(active_power - noise_power, cfg.epsilon) / noise_power)
    return SnrEstimate(snr_db=_clamp(snr_db, cfg.clamp_db), n_noise_frames=n_noise, n_active_frames=int(active.sum()))


def _energy_split_snr(powers: np.ndarray, cfg: SnrConfig) -> SnrEstimate:
    low, _ = cfg.clamp_db
    mean_power = float(np.mean(powers))
    if mean_power <= 0:
        return SnrEstimate(snr_db=low, n_noise_frames=int(powers.shape[0]), n_active_frames=0)

    speech = powers / mean_power > cfg.energy_split_threshold
    speech_power = float(np.mean(powers[speech])) if speech.any() else cfg.epsilon
    # no noise frames: treat the whole file as noisy speech
    noise_power = float(np.mean(powers[~speech])) if (~speech).any() else speech_power
    if noise_power <= 0:
        snr_db = float("inf")
    else:
        snr_db = 10.0 * math.log10(speech_power / noise_power)
    return SnrEstimate(
        snr_db=_clamp(snr_db, cfg.clamp_db),
        n_noise_frames=int((~speech).sum()),
        n_active_frames=int(speech.sum()),
    )


def estimate_utterance_snr(utt: Utterance, method: str = "percentile", cfg: Optional[SnrConfig] = None) -> SnrEstimate:
    """
    Estimate the SNR of one utterance.

    Args:
        utt: Utterance of at least 64 ms
        method: "percentile" (default) or "energy_split"
        cfg: Estimator settings

    Returns:
        Clamped estimate; all-zero input yields the clamp minimum with no active frames
    """
    cfg = cfg or SnrConfig()
    powers = _frame_powers(utt)
    if method == "percentile":
        return _percentile_snr(powers, cfg)
    if method == "energy_split":
        return _energy_split_snr(powers, cfg)
    raise ValueError(f"Unknown SNR method '{method}', expected one of {SNR_METHODS}")


def group_snr_stats(
    corpus: Corpus,
    estimates: Optional[Dict[str, SnrEstimate]] = None,
    method: str = "percentile",
) -> Dict[Group, GroupSnrStats]:
    """
    Mean and population standard deviation of utterance SNRs per group.

    Args:
        corpus: Loaded corpus
        estimates: Precomputed estimates keyed by utterance id
        method: Estimator used when estimates are not supplied

    Raises:
        EmptyGroupError: A group has no utterances
    """
    stats = {}
    for group in Group:
        utterances = corpus.by_group(group)
        if not utterances:
            raise EmptyGroupError(f"group {group.value} has no utterances")
        values = np.array([
            (estimates[utt.utterance_id] if estimates is not None else estimate_utterance_snr(utt, method)).snr_db
            for utt in utterances
        ])
        stats[group] = GroupSnrStats(
            group=group,
            mean_db=float(np.mean(values)),
            std_db=float(np.std(values)),
            n_utterances=int(values.shape[0]),
        )
    return stats


def snr_table(corpus: Corpus, estimates: Dict[str, SnrEstimate]) -> List[Dict[str, object]]:
    """Rows for the per-utterance SNR CSV, in corpus order."""
    rows = []
    for speaker in corpus.speakers:
        for utt in speaker.utterances:
            estimate = estimates[utt.utterance_id]
            rows.append({
                "utterance_id": utt.utterance_id,
                "speaker_id": utt.speaker_id,
                "group": speaker.record.group.value,
                "snr_db": estimate.snr_db,
                "n_noise_frames": estimate.n_noise_frames,
                "n_active_frames": estimate.n_active_frames,
            })
    return rows
