import json
import os

import numpy as np
import pytest

from src.config import SAMPLE_RATE
from src.core.exceptions import (
    DuplicateSpeakerError,
    EmptyManifestError,
    ManifestError,
    ManifestNotFoundError,
    MissingGroupError,
    UnknownGroupError,
)
from src.modules.corpus import (
    Group,
    NoiseColor,
    SynthSpec,
    generate_synthetic_corpus,
    load_manifest,
    load_sidecar,
    noise_signal,
    parse_manifest,
    read_wav,
    speaker_f0,
    synthesize_utterance,
    write_wav,
)


def test_parse_manifest_groups_speakers_in_order():
    text = "# header\nspk1\tA\ta.wav\nspk1\tA\tb.wav\n\nspk2\tB\tc.wav\n"
    records = parse_manifest(text, base_dir="/data")
    assert [r.speaker_id for r in records] == ["spk1", "spk2"]
    assert records[0].group is Group.A and records[1].group is Group.B
    assert records[0].utterance_paths == (os.path.normpath("/data/a.wav"), os.path.normpath("/data/b.wav"))


@pytest.mark.parametrize("text, error", [
    ("spk1\tA\ta.wav\nspk2\tB\tb.wav\nspk1\tA\tc.wav\n", DuplicateSpeakerError),
    ("spk1\tA\ta.wav\nspk1\tB\tb.wav\nspk2\tB\tc.wav\n", DuplicateSpeakerError),
    ("spk1\tC\ta.wav\nspk2\tB\tb.wav\n", UnknownGroupError),
    ("# only a comment\n\n", EmptyManifestError),
    ("spk1\tA\ta.wav\nspk2\tA\tb.wav\n", MissingGroupError),
    ("spk1 A a.wav\n", ManifestError),
])
def test_parse_manifest_errors(text, error):
    with pytest.raises(error):
        parse_manifest(text)


def test_load_manifest_missing_file(tmp_path):
    with pytest.raises(ManifestNotFoundError):
        load_manifest(str(tmp_path / "absent.tsv"))


def test_read_wav_builds_utterance(tmp_path):
    path = str(tmp_path / "spk1" / "u007.wav")
    write_wav(path, np.full(800, 0.25))
    utt = read_wav(path, speaker_id="spk1", group=Group.B)
    assert utt.utterance_id == "spk1/u007"
    assert utt.n_samples == 800 and utt.sample_rate == SAMPLE_RATE
    assert np.all(utt.samples == 0.25)


@pytest.mark.parametrize("color", list(NoiseColor))
def test_noise_signal_has_unit_power(color, rng):
    noise = noise_signal(32000, color, rng)
    assert np.mean(noise ** 2) == pytest.approx(1.0, rel=1e-9)


def test_pink_noise_falls_with_frequency(rng):
    noise = noise_signal(2 ** 16, NoiseColor.PINK, rng)
    power = np.abs(np.fft.rfft(noise)) ** 2
    freqs = np.fft.rfftfreq(noise.shape[0], 1 / SAMPLE_RATE)
    low = power[(freqs > 100) & (freqs < 200)].mean()
    high = power[(freqs > 3200) & (freqs < 6400)].mean()
    # -3 dB/octave over 5 octaves
    assert 10 * np.log10(low / high) == pytest.approx(15.0, abs=3.0)


def test_synthesized_mixture_hits_target_snr():
    spec = SynthSpec(snr_db_group_a=30.0, snr_db_group_b=0.0)
    for group, target in ((Group.A, 30.0), (Group.B, 0.0)):
        utt = synthesize_utterance(spec, group, speaker_index=0, utterance_index=3, f0=150.0)
        region = slice(utt.speech_start, utt.speech_end)
        snr = 10 * np.log10(np.mean(utt.clean[region] ** 2) / np.mean(utt.noise[region] ** 2))
        assert snr == pytest.approx(target, abs=1e-6)
        np.testing.assert_allclose(utt.mixture, utt.clean + utt.noise)
        assert np.max(np.abs(utt.mixture)) <= 0.95 + 1e-12
        assert np.all(utt.clean[:utt.speech_start] == 0) and np.all(utt.clean[utt.speech_end:] == 0)


def test_speaker_f0_is_deterministic_and_in_range():
    values = [speaker_f0(7, i) for i in range(50)]
    assert values == [speaker_f0(7, i) for i in range(50)]
    assert all(90.0 <= v <= 250.0 for v in values)
    assert speaker_f0(7, 0) != speaker_f0(8, 0)


def test_synth_spec_validation():
    with pytest.raises(ValueError):
        SynthSpec(speakers_per_group=0)
    with pytest.raises(ValueError):
        SynthSpec(speech_duration_s=0.0)


def test_generated_corpus_layout(small_synth, small_corpus):
    assert os.path.basename(small_synth.manifest_path) == "manifest.tsv"
    records = load_manifest(small_synth.manifest_path)
    assert [r.speaker_id for r in records] == ["spkA00", "spkA01", "spkA02", "spkB00", "spkB01", "spkB02"]
    assert all(len(r.utterance_paths) == 4 for r in records)

    truth = load_sidecar(small_synth.sidecar_path)
    assert len(truth) == 24
    first = truth[0]
    assert first.utterance_id == "spkA00/u000"
    assert (first.speech_start_s, first.speech_end_s) == (0.5, 1.5)
    assert {t.true_snr_db for t in truth if t.group is Group.B} == {0.0}
    assert all(90.0 <= t.f0_hz <= 250.0 for t in truth)

    assert len(small_corpus.utterances()) == 24
    assert all(utt.n_samples == 2 * SAMPLE_RATE for utt in small_corpus.utterances())


def test_generation_is_byte_identical(tmp_path):
    spec = SynthSpec(speakers_per_group=1, utterances_per_speaker=2)
    first = generate_synthetic_corpus(spec, str(tmp_path / "one"))
    second = generate_synthetic_corpus(spec, str(tmp_path / "two"), n_jobs=2)
    for rel in ("manifest.tsv", "ground_truth.json", "wav/spkB00/u001.wav"):
        with open(os.path.join(tmp_path, "one", rel), "rb") as a, open(os.path.join(tmp_path, "two", rel), "rb") as b:
            assert a.read() == b.read()
    with open(first.sidecar_path, encoding="utf-8") as handle:
        assert len(json.load(handle)) == 4
    assert second.ground_truth[0].speaker_id == "spkA00"
