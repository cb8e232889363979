import json

import numpy as np
import pytest

from conftest import build_corpus, make_utterance, tone
from src.config import SAMPLE_RATE, VadConfig
from src.core.dsp import frame_powers
from src.core.exceptions import EmptyGroupError, SignalTooShortError, SpanBoundsError
from src.modules.corpus.models import Group
from src.modules.segmentation import (
    SegmentLabel,
    SegmentSpan,
    detect_segments,
    detect_segments_with,
    dump_segments,
    estimate_utterance_snr,
    group_snr_stats,
    snr_table,
    speaker_durations,
    split_utterance,
)


def speech_in_noise(rng, snr_db=None, noise_std=1e-3, lead_s=0.5, body_s=1.0, trail_s=0.5, freq=440.0):
    """Noise throughout, a tone in the middle; snr_db sets the tone level over the tone region."""
    n = int(round((lead_s + body_s + trail_s) * SAMPLE_RATE))
    start = int(round(lead_s * SAMPLE_RATE))
    end = start + int(round(body_s * SAMPLE_RATE))
    noise = rng.standard_normal(n) * noise_std
    signal = tone(freq, body_s, amplitude=1.0)
    if snr_db is None:
        signal *= 0.5
    else:
        noise_power = np.mean(noise[start:end] ** 2)
        signal *= np.sqrt(noise_power * 10 ** (snr_db / 10) / np.mean(signal ** 2))
    mixture = noise.copy()
    mixture[start:end] += signal
    return mixture


def assert_tiles(spans, duration_s):
    assert spans[0].start_s == 0.0
    assert spans[-1].end_s == pytest.approx(duration_s, abs=1e-12)
    for left, right in zip(spans, spans[1:]):
        assert left.end_s == right.start_s
        assert left.label is not right.label


def test_vad_recovers_speech_boundaries(rng):
    utt = make_utterance(speech_in_noise(rng))
    spans = detect_segments(utt, hangover_frames=0)
    assert_tiles(spans, utt.duration_s)
    speech = [s for s in spans if s.label is SegmentLabel.SPEECH]
    assert len(speech) == 1
    assert speech[0].start_s == pytest.approx(0.5, abs=0.032)
    assert speech[0].end_s == pytest.approx(1.5, abs=0.032)


def test_hangover_extends_speech_end_by_whole_frames(rng):
    utt = make_utterance(speech_in_noise(rng))
    plain = [s for s in detect_segments(utt, hangover_frames=0) if s.label is SegmentLabel.SPEECH][0]
    held = [s for s in detect_segments(utt, hangover_frames=3) if s.label is SegmentLabel.SPEECH][0]
    assert held.start_s == plain.start_s
    assert held.end_s - plain.end_s == pytest.approx(3 * 0.016, abs=1e-9)


def speech_extent(spans):
    speech = [s for s in spans if s.label is SegmentLabel.SPEECH]
    return speech[0].start_s, speech[-1].end_s


def test_vad_matches_sidecar_boundaries_of_clean_group(small_synth, small_corpus):
    truth = {record.utterance_id: record for record in small_synth.ground_truth}
    for utt in small_corpus.by_group(Group.A):
        start, end = speech_extent(detect_segments(utt, hangover_frames=0))
        assert start == pytest.approx(truth[utt.utterance_id].speech_start_s, abs=0.032)
        assert end == pytest.approx(truth[utt.utterance_id].speech_end_s, abs=0.032)


def test_default_hangover_only_delays_the_speech_end(small_synth, small_corpus):
    truth = {record.utterance_id: record for record in small_synth.ground_truth}
    hangover_s = VadConfig().hangover_frames * 0.016
    for utt in small_corpus.by_group(Group.A):
        start, end = speech_extent(detect_segments(utt))
        assert start == pytest.approx(truth[utt.utterance_id].speech_start_s, abs=0.032)
        assert -0.032 <= end - truth[utt.utterance_id].speech_end_s <= 0.032 + hangover_s


def test_raising_the_threshold_never_adds_speech(small_corpus):
    for utt in small_corpus.utterances()[::3]:
        durations = [
            sum(s.duration_s for s in detect_segments(utt, threshold_db_over_floor=t) if s.label is SegmentLabel.SPEECH)
            for t in (3.0, 6.0, 9.0, 12.0, 18.0)
        ]
        assert all(high <= low + 1e-12 for low, high in zip(durations, durations[1:]))

def test_vad_default_settings_tile_synthetic_corpus(small_corpus):
    for utt in small_corpus.utterances():
        spans = detect_segments_with(utt, VadConfig())
        assert_tiles(spans, utt.duration_s)
        speech, nonspeech = split_utterance(utt, spans)
        assert speech.shape[0] + nonspeech.shape[0] == utt.n_samples


def test_vad_on_silence_is_all_nonspeech():
    utt = make_utterance(np.zeros(SAMPLE_RATE))
    spans = detect_segments(utt)
    assert [s.label for s in spans] == [SegmentLabel.NONSPEECH]
    assert_tiles(spans, 1.0)


def test_short_gaps_are_bridged_and_short_bursts_dropped(rng):
    samples = rng.standard_normal(SAMPLE_RATE * 2) * 1e-3
    samples[8000:16000] += tone(300.0, 0.5)
    samples[17200:24000] += tone(300.0, 0.425)  # three silent frames, a 48 ms span gap
    samples[28000:28800] += tone(300.0, 0.05)  # 80 ms once framed
    utt = make_utterance(samples)

    bridged = [s for s in detect_segments(utt, hangover_frames=0) if s.label is SegmentLabel.SPEECH]
    assert len(bridged) == 1
    assert bridged[0].end_s == pytest.approx(1.5, abs=0.032)

    split = [s for s in detect_segments(utt, max_gap_ms=40.0, hangover_frames=0) if s.label is SegmentLabel.SPEECH]
    assert len(split) == 2


def test_vad_rejects_too_short_input():
    with pytest.raises(SignalTooShortError):
        detect_segments(make_utterance(np.zeros(1000)))


def test_split_utterance_concatenates_by_label():
    utt = make_utterance(np.arange(16000, dtype=np.float64) / 16000)
    spans = [
        SegmentSpan(SegmentLabel.NONSPEECH, 0.0, 0.25),
        SegmentSpan(SegmentLabel.SPEECH, 0.25, 0.5),
        SegmentSpan(SegmentLabel.NONSPEECH, 0.5, 1.0),
    ]
    speech, nonspeech = split_utterance(utt, spans)
    np.testing.assert_array_equal(speech, utt.samples[4000:8000])
    np.testing.assert_array_equal(nonspeech, np.concatenate([utt.samples[:4000], utt.samples[8000:]]))


def test_split_utterance_rejects_spans_outside_the_file():
    utt = make_utterance(np.zeros(1600))
    with pytest.raises(SpanBoundsError):
        split_utterance(utt, [SegmentSpan(SegmentLabel.SPEECH, 0.0, 0.2)])


@pytest.mark.parametrize("snr_db", [-5.0, 0.0, 10.0, 20.0])
def test_percentile_snr_tracks_constructed_mixtures(snr_db, rng):
    utt = make_utterance(speech_in_noise(rng, snr_db=snr_db, noise_std=0.01))
    assert estimate_utterance_snr(utt).snr_db == pytest.approx(snr_db, abs=3.0)


def test_percentile_snr_is_scale_invariant(rng):
    samples = speech_in_noise(rng, snr_db=10.0, noise_std=0.001)
    quiet = estimate_utterance_snr(make_utterance(samples)).snr_db
    loud = estimate_utterance_snr(make_utterance(samples * 100.0)).snr_db
    assert abs(quiet - loud) < 0.01


def test_percentile_snr_falls_as_noise_grows(rng):
    noise = rng.standard_normal(2 * SAMPLE_RATE)
    clean = np.zeros(2 * SAMPLE_RATE)
    clean[8000:24000] = tone(440.0, 1.0)
    estimates = [
        estimate_utterance_snr(make_utterance(clean + level * noise)).snr_db
        for level in (0.001, 0.003, 0.01, 0.03, 0.1)
    ]
    assert all(later < earlier for earlier, later in zip(estimates, estimates[1:]))
    assert -20.0 < estimates[-1] and estimates[0] < 60.0


def test_stationary_noise_falls_back_to_the_louder_half(rng):
    samples = rng.standard_normal(2 * SAMPLE_RATE) * 0.1
    powers = frame_powers(samples, 512, 256)
    estimate = estimate_utterance_snr(make_utterance(samples))
    assert not np.any(powers > 2.0 * np.mean(np.sort(powers)[:len(powers) // 5]))
    assert estimate.n_active_frames == int(np.sum(powers > np.median(powers)))
    assert -20.0 < estimate.snr_db < 0.0


def test_snr_of_silence_is_clamped_low():
    estimate = estimate_utterance_snr(make_utterance(np.zeros(SAMPLE_RATE)))
    assert estimate.snr_db == -20.0
    assert estimate.n_active_frames == 0


def test_energy_split_snr_and_unknown_method(rng):
    utt = make_utterance(speech_in_noise(rng, noise_std=1e-4))
    assert estimate_utterance_snr(utt, method="energy_split").snr_db >= 50.0
    with pytest.raises(ValueError):
        estimate_utterance_snr(utt, method="wada")


def test_group_snr_stats_separates_synthetic_groups(small_corpus):
    stats = group_snr_stats(small_corpus)
    assert stats[Group.A].mean_db - stats[Group.B].mean_db >= 15.0
    assert stats[Group.A].n_utterances == 12


def test_group_snr_stats_identical_groups(rng):
    signals = [speech_in_noise(rng, snr_db=10.0, noise_std=0.01) for _ in range(3)]
    corpus = build_corpus({"a": signals, "b": signals}, {"a": Group.A, "b": Group.B})
    stats = group_snr_stats(corpus)
    assert stats[Group.A].mean_db == stats[Group.B].mean_db
    assert stats[Group.A].std_db == stats[Group.B].std_db


def test_group_snr_stats_requires_both_groups(rng):
    corpus = build_corpus({"a": [speech_in_noise(rng)]}, {"a": Group.A})
    with pytest.raises(EmptyGroupError):
        group_snr_stats(corpus)


def test_snr_table_has_one_row_per_utterance(small_corpus):
    estimates = {utt.utterance_id: estimate_utterance_snr(utt) for utt in small_corpus.utterances()}
    rows = snr_table(small_corpus, estimates)
    assert len(rows) == len(small_corpus.utterances())
    assert set(rows[0]) == {"utterance_id", "speaker_id", "group", "snr_db", "n_noise_frames", "n_active_frames"}


def test_speaker_durations_and_segment_dump(small_corpus, tmp_path):
    spans = {utt.utterance_id: detect_segments(utt) for utt in small_corpus.utterances()}
    durations = speaker_durations(small_corpus, spans)
    assert len(durations) == 6
    for duration in durations:
        assert duration.total_s == pytest.approx(4 * 2.0)
        assert duration.speech_s > 0 and duration.nonspeech_s > 0

    path = tmp_path / "segments.json"
    dump_segments(spans, str(path))
    records = json.loads(path.read_text(encoding="utf-8"))
    assert records[0]["utterance_id"] == "spkA00/u000"
    assert set(records[0]) == {"utterance_id", "label", "start_s", "end_s"}
