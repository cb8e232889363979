"""
Segmentation Data Models

Author: Corpus Audit Team
Date: October 18, 2026
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

from src.config import SAMPLE_RATE


class SegmentLabel(str, Enum):
    SPEECH = "speech"
    NONSPEECH = "nonspeech"


@dataclass(frozen=True)
class SegmentSpan:
    """A labeled interval of an utterance; boundaries fall on sample instants."""
    label: SegmentLabel
    start_s: float
    end_s: float

    def __post_init__(self):
        object.__setattr__(self, "label", SegmentLabel(self.label))
        if not 0.0 <= self.start_s < self.end_s:
            raise ValueError(f"invalid span [{self.start_s}, {self.end_s})")

    @classmethod
    def from_samples(cls, label: SegmentLabel, start: int, end: int) -> "SegmentSpan":
        return cls(label=label, start_s=start / SAMPLE_RATE, end_s=end / SAMPLE_RATE)

    def sample_bounds(self, sample_rate: int = SAMPLE_RATE) -> Tuple[int, int]:
        return int(round(self.start_s * sample_rate)), int(round(self.end_s * sample_rate))

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s

    def to_dict(self) -> Dict[str, object]:
        return {"label": self.label.value, "start_s": self.start_s, "end_s": self.end_s}


@dataclass(frozen=True)
class SnrEstimate:
    """Utterance-level SNR in dB with the frame counts it was computed from."""
    snr_db: float
    n_noise_frames: int
    n_active_frames: int


@dataclass(frozen=True)
class SpeakerDuration:
    speaker_id: str
    speech_s: float
    nonspeech_s: float

    @property
    def total_s(self) -> float:
        return self.speech_s + self.nonspeech_s
