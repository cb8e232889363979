"""
Corpus Module

Manifest parsing, WAV loading and synthetic planted-bias corpora.
"""

from .manifest import load_corpus, load_manifest, load_sidecar, parse_manifest, read_wav, write_wav
from .models import Corpus, GroundTruth, Group, NoiseColor, SpeakerRecord, SpeakerUtterances, SynthSpec, Utterance
from .synthesis import generate_synthetic_corpus, noise_signal, speaker_f0, synthesize_utterance

__all__ = [
    "Corpus",
    "GroundTruth",
    "Group",
    "NoiseColor",
    "SpeakerRecord",
    "SpeakerUtterances",
    "SynthSpec",
    "Utterance",
    "generate_synthetic_corpus",
    "load_corpus",
    "load_manifest",
    "load_sidecar",
    "noise_signal",
    "parse_manifest",
    "read_wav",
    "speaker_f0",
    "synthesize_utterance",
    "write_wav",
]
