"""
Energy Voice Activity Detection

Splits utterances into speech and non-speech spans from frame energies
relative to an estimated noise floor, and cuts signals along those spans.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import json
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.signal import medfilt

from src.config import SAMPLE_RATE, VadConfig
from src.core.dsp import frame_powers, ms_to_samples
from src.core.exceptions import SignalTooShortError, SpanBoundsError
from src.modules.corpus.models import Corpus, Utterance
from src.modules.segmentation.models import SegmentLabel, SegmentSpan, SpeakerDuration

POWER_FLOOR = 1e-20


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Half-open index ranges of consecutive True values."""
    padded = np.concatenate([[False], mask.astype(bool), [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return list(zip(edges[0::2].tolist(), edges[1::2].tolist()))


def _extend_runs(mask: np.ndarray, frames: int) -> np.ndarray:
    extended = mask.copy()
    for shift in range(1, frames + 1):
        extended[shift:] |= mask[:-shift]
    return extended


def active_frames(samples: np.ndarray, cfg: VadConfig) -> np.ndarray:
    """
    Per-frame activity after thresholding, median smoothing and hangover.

    Frames whose dB power exceeds the mean dB of the lowest-decile frames by
    more than the threshold are active.
    """
    frame_length = ms_to_samples(cfg.frame_ms)
    hop_length = ms_to_samples(cfg.hop_ms)
    powers_db = 10.0 * np.log10(frame_powers(samples, frame_length, hop_length) + POWER_FLOOR)

    n_floor = max(1, int(cfg.floor_fraction * powers_db.shape[0]))
    floor_db = np.mean(np.sort(powers_db)[:n_floor])
    active = powers_db > floor_db + cfg.threshold_db_over_floor

    if cfg.median_frames > 1:
        active = medfilt(active.astype(np.float64), cfg.median_frames) > 0.5
    return _extend_runs(active, cfg.hangover_frames)


def detect_segments_with(utt: Utterance, cfg: VadConfig) -> List[SegmentSpan]:
    """
    Energy VAD with an explicit configuration.

    Frame i owns the samples of its central hop, [i*hop + (frame-hop)/2,
    i*hop + (frame+hop)/2); the first and last frames extend to the file
    edges, so frame decisions map to spans that tile the utterance.

    Raises:
        SignalTooShortError: Utterance shorter than two frames (64 ms)
    """
    samples = utt.samples
    frame_length = ms_to_samples(cfg.frame_ms)
    hop_length = ms_to_samples(cfg.hop_ms)
    if samples.shape[0] < 2 * frame_length:
        raise SignalTooShortError(f"{utt.utterance_id}: VAD needs at least {2 * cfg.frame_ms:g} ms")

    active = active_frames(samples, cfg)
    n_frames = active.shape[0]
    n_samples = samples.shape[0]
    offset = (frame_length - hop_length) // 2

    def boundary(frame_index: int) -> int:
        if frame_index <= 0:
            return 0
        if frame_index >= n_frames:
            return n_samples
        return frame_index * hop_length + offset

    speech = [(boundary(a), boundary(b)) for a, b in _runs(active)]

    min_speech = ms_to_samples(cfg.min_speech_ms)
    speech = [(s, e) for s, e in speech if e - s >= min_speech]

    max_gap = ms_to_samples(cfg.max_gap_ms)
    merged: List[Tuple[int, int]] = []
    for start, end in speech:
        if merged and start - merged[-1][1] < max_gap:
            merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))

    spans: List[SegmentSpan] = []
    cursor = 0
    for start, end in merged:
        if start > cursor:
            spans.append(SegmentSpan.from_samples(SegmentLabel.NONSPEECH, cursor, start))
        spans.append(SegmentSpan.from_samples(SegmentLabel.SPEECH, start, end))
        cursor = end
    if cursor < n_samples:
        spans.append(SegmentSpan.from_samples(SegmentLabel.NONSPEECH, cursor, n_samples))
    return spans


def detect_segments(
    utt: Utterance,
    threshold_db_over_floor: float = 6.0,
    min_speech_ms: float = 100.0,
    max_gap_ms: float = 50.0,
    hangover_frames: int = 3,
) -> List[SegmentSpan]:
    """
    Split an utterance into tiling speech / non-speech spans.

    Args:
        utt: Utterance of at least 64 ms
        threshold_db_over_floor: Activity threshold above the noise floor
        min_speech_ms: Shorter speech runs are discarded
        max_gap_ms: Shorter gaps between speech runs are bridged
        hangover_frames: Frames appended to every active run

    Returns:
        Ordered spans covering [0, duration] with no two adjacent spans sharing a label
    """
    cfg = VadConfig(
        threshold_db_over_floor=threshold_db_over_floor,
        min_speech_ms=min_speech_ms,
        max_gap_ms=max_gap_ms,
        hangover_frames=hangover_frames,
    )
    return detect_segments_with(utt, cfg)


def split_utterance(utt: Utterance, spans: Sequence[SegmentSpan]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Concatenate the samples of speech spans and of non-speech spans.

    Raises:
        SpanBoundsError: A span extends beyond the utterance
    """
    speech_parts, nonspeech_parts = [], []
    n_samples = utt.n_samples
    for span in sorted(spans, key=lambda s: s.start_s):
        start, end = span.sample_bounds(utt.sample_rate)
        if start < 0 or end > n_samples:
            raise SpanBoundsError(
                f"{utt.utterance_id}: span [{span.start_s}, {span.end_s}] outside [0, {utt.duration_s}]"
            )
        target = speech_parts if span.label is SegmentLabel.SPEECH else nonspeech_parts
        target.append(utt.samples[start:end])

    def join(parts: List[np.ndarray]) -> np.ndarray:
        return np.concatenate(parts) if parts else np.zeros(0, dtype=utt.samples.dtype)

    return join(speech_parts), join(nonspeech_parts)


def speaker_durations(corpus: Corpus, spans: Dict[str, Sequence[SegmentSpan]]) -> List[SpeakerDuration]:
    """Per-speaker totals of speech and non-speech seconds, in corpus order."""
    totals = []
    for speaker in corpus.speakers:
        speech_samples = nonspeech_samples = 0
        for utt in speaker.utterances:
            for span in spans[utt.utterance_id]:
                start, end = span.sample_bounds(utt.sample_rate)
                if span.label is SegmentLabel.SPEECH:
                    speech_samples += end - start
                else:
                    nonspeech_samples += end - start
        totals.append(SpeakerDuration(
            speaker_id=speaker.record.speaker_id,
            speech_s=speech_samples / SAMPLE_RATE,
            nonspeech_s=nonspeech_samples / SAMPLE_RATE,
        ))
    return totals


def segment_records(spans: Dict[str, Sequence[SegmentSpan]]) -> List[Dict[str, object]]:
    """Flatten per-utterance spans into dump records ordered by utterance id."""
    records = []
    for utterance_id in sorted(spans):
        for span in spans[utterance_id]:
            records.append({"utterance_id": utterance_id, **span.to_dict()})
    return records


def dump_segments(spans: Dict[str, Sequence[SegmentSpan]], path: str) -> None:
    """Write the JSON segment dump: [{utterance_id, label, start_s, end_s}, ...]."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(segment_records(spans), handle, indent=2, sort_keys=True)
        handle.write("\n")
