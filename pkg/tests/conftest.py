"""Shared fixtures: seeded generators, in-memory utterances and small synthetic corpora."""

import os

import numpy as np
import pytest

from src.config import SAMPLE_RATE
from src.modules.corpus import SynthSpec, generate_synthetic_corpus, load_corpus
from src.modules.corpus.models import Corpus, Group, SpeakerRecord, SpeakerUtterances, Utterance


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_utterance(samples, utterance_id="spk/u000", speaker_id="spk", group=Group.A) -> Utterance:
    return Utterance(utterance_id=utterance_id, speaker_id=speaker_id,
                     samples=np.asarray(samples, dtype=np.float64), group=group)


def tone(freq_hz: float, seconds: float, amplitude: float = 0.5) -> np.ndarray:
    t = np.arange(int(round(seconds * SAMPLE_RATE))) / SAMPLE_RATE
    return amplitude * np.sin(2 * np.pi * freq_hz * t)


def build_corpus(signals_by_speaker, groups) -> Corpus:
    """In-memory corpus from {speaker_id: [signal, ...]} and {speaker_id: Group}."""
    speakers = []
    for speaker_id, signals in signals_by_speaker.items():
        paths = tuple(f"/virtual/{speaker_id}/u{i:03d}.wav" for i in range(len(signals)))
        record = SpeakerRecord(speaker_id=speaker_id, group=groups[speaker_id], utterance_paths=paths)
        utterances = [
            make_utterance(signal, f"{speaker_id}/u{i:03d}", speaker_id, groups[speaker_id])
            for i, signal in enumerate(signals)
        ]
        speakers.append(SpeakerUtterances(record=record, utterances=utterances))
    return Corpus(speakers=speakers, source="memory")


@pytest.fixture(scope="session")
def small_synth(tmp_path_factory):
    """Three speakers per group, four utterances each; group B noisy."""
    out_dir = str(tmp_path_factory.mktemp("small_synth"))
    spec = SynthSpec(speakers_per_group=3, utterances_per_speaker=4, snr_db_group_a=30.0, snr_db_group_b=0.0)
    return generate_synthetic_corpus(spec, out_dir)


@pytest.fixture(scope="session")
def small_corpus(small_synth):
    return load_corpus(small_synth.manifest_path)


@pytest.fixture
def manifest_dir(tmp_path):
    os.makedirs(tmp_path / "wav", exist_ok=True)
    return tmp_path
