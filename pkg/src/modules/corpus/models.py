"""
Corpus Data Models

Speaker records, utterances and synthetic-corpus specifications.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.config import SAMPLE_RATE


class Group(str, Enum):
    """Speaker group: A is the control group, B the target group."""
    A = "A"
    B = "B"

    @property
    def label(self) -> int:
        """Binary class used by the classifiers (target group = 1)."""
        return 1 if self is Group.B else 0


class NoiseColor(str, Enum):
    WHITE = "white"
    PINK = "pink"


@dataclass(frozen=True)
class SpeakerRecord:
    """One manifest speaker with its resolved utterance paths."""
    speaker_id: str
    group: Group
    utterance_paths: Tuple[str, ...]

    def __post_init__(self):
        if not self.utterance_paths:
            raise ValueError(f"speaker {self.speaker_id} has no utterances")


@dataclass(frozen=True, eq=False)
class Utterance:
    """A mono 16 kHz recording scaled into [-1, 1]."""
    utterance_id: str
    speaker_id: str
    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE
    group: Optional[Group] = None

    def __post_init__(self):
        if self.sample_rate != SAMPLE_RATE:
            raise ValueError(f"{self.utterance_id}: sample rate must be {SAMPLE_RATE}")
        if self.samples.ndim != 1 or self.samples.shape[0] == 0:
            raise ValueError(f"{self.utterance_id}: samples must be a non-empty mono array")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError(f"{self.utterance_id}: samples must be finite")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate


@dataclass
class SpeakerUtterances:
    record: SpeakerRecord
    utterances: List[Utterance] = field(default_factory=list)


@dataclass
class Corpus:
    """Loaded corpus: speakers in manifest order, each with its utterances."""
    speakers: List[SpeakerUtterances]
    source: str = ""

    def utterances(self) -> List[Utterance]:
        return [utt for speaker in self.speakers for utt in speaker.utterances]

    def records(self) -> List[SpeakerRecord]:
        return [speaker.record for speaker in self.speakers]

    def group_of(self) -> Dict[str, Group]:
        return {speaker.record.speaker_id: speaker.record.group for speaker in self.speakers}

    def by_group(self, group: Group) -> List[Utterance]:
        return [
            utt
            for speaker in self.speakers
            if speaker.record.group is group
            for utt in speaker.utterances
        ]


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of a planted-bias two-group synthetic corpus."""
    speakers_per_group: int = 10
    utterances_per_speaker: int = 40
    snr_db_group_a: float = 30.0
    snr_db_group_b: float = 0.0
    tilt_db_per_octave_group_b: float = 0.0
    speech_duration_s: float = 1.0
    leading_silence_s: float = 0.5
    trailing_silence_s: float = 0.5
    noise_color: NoiseColor = NoiseColor.WHITE
    seed: int = 7

    def __post_init__(self):
        if self.speakers_per_group < 1 or self.utterances_per_speaker < 1:
            raise ValueError("speaker and utterance counts must be at least 1")
        if min(self.speech_duration_s, self.leading_silence_s, self.trailing_silence_s) <= 0:
            raise ValueError("durations must be positive")
        for value in (self.snr_db_group_a, self.snr_db_group_b, self.tilt_db_per_octave_group_b):
            if not math.isfinite(value):
                raise ValueError("SNR and tilt values must be finite")
        object.__setattr__(self, "noise_color", NoiseColor(self.noise_color))

    def snr_for(self, group: Group) -> float:
        return self.snr_db_group_a if group is Group.A else self.snr_db_group_b

    def tilt_for(self, group: Group) -> float:
        return 0.0 if group is Group.A else self.tilt_db_per_octave_group_b


@dataclass(frozen=True)
class GroundTruth:
    """Sidecar record of one generated utterance."""
    utterance_id: str
    speaker_id: str
    group: Group
    true_snr_db: float
    speech_start_s: float
    speech_end_s: float
    f0_hz: float

    def to_dict(self) -> Dict[str, object]:
        return {
            "utterance_id": self.utterance_id,
            "speaker_id": self.speaker_id,
            "group": self.group.value,
            "true_snr_db": self.true_snr_db,
            "speech_start_s": self.speech_start_s,
            "speech_end_s": self.speech_end_s,
            "f0_hz": self.f0_hz,
        }
