"""
Segmentation Module

Energy VAD, speech / non-speech splitting and utterance-level SNR estimation.
"""

from .models import SegmentLabel, SegmentSpan, SnrEstimate, SpeakerDuration
from .snr import SNR_METHODS, GroupSnrStats, estimate_utterance_snr, group_snr_stats, snr_table
from .vad import (
    detect_segments,
    detect_segments_with,
    dump_segments,
    segment_records,
    speaker_durations,
    split_utterance,
)

__all__ = [
    "SNR_METHODS",
    "GroupSnrStats",
    "SegmentLabel",
    "SegmentSpan",
    "SnrEstimate",
    "SpeakerDuration",
    "detect_segments",
    "detect_segments_with",
    "dump_segments",
    "estimate_utterance_snr",
    "group_snr_stats",
    "segment_records",
    "snr_table",
    "speaker_durations",
    "split_utterance",
]
