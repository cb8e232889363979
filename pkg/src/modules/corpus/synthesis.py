"""
Synthetic Corpus Generator

Builds two-group corpora with a planted, known source of separability:
a group-specific noise level mixed over the whole file, and an optional
spectral tilt applied to group B's speech only.

Each utterance is leading silence, a harmonic vowel-like signal with a
syllabic amplitude envelope, and trailing silence. Noise is mixed at the
group's SNR measured over the speech region.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import hashlib
import os
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.config import SAMPLE_RATE
from src.modules.corpus.manifest import write_sidecar, write_wav
from src.modules.corpus.models import GroundTruth, Group, NoiseColor, SynthSpec
from src.utils.logger import ApplicationLogger

logger = ApplicationLogger("CorpusSynthesis")

SPEECH_POWER = 0.01
MAX_HARMONIC_HZ = 3800.0
TILT_REFERENCE_HZ = 500.0
SYLLABLE_PERIOD_S = 0.5
SYLLABLE_ON_S = 0.125
SYLLABLE_FLOOR = 0.2
VIBRATO_DEPTH = 0.01
VIBRATO_RATE_HZ = 5.0
SMOOTHING_S = 0.010
PEAK_LIMIT = 0.95
F0_RANGE_HZ = (90.0, 250.0)

MANIFEST_NAME = "manifest.tsv"
SIDECAR_NAME = "ground_truth.json"


@dataclass(frozen=True)
class SynthesizedUtterance:
    """Components of one generated utterance before quantization."""
    clean: np.ndarray
    noise: np.ndarray
    mixture: np.ndarray
    speech_start: int
    speech_end: int

    @property
    def speech_start_s(self) -> float:
        return self.speech_start / SAMPLE_RATE

    @property
    def speech_end_s(self) -> float:
        return self.speech_end / SAMPLE_RATE


@dataclass(frozen=True)
class SynthResult:
    manifest_path: str
    sidecar_path: str
    ground_truth: Tuple[GroundTruth, ...]


def speaker_f0(seed: int, speaker_index: int) -> float:
    """Deterministic f0 in [90, 250] Hz from a hash of (seed, speaker index)."""
    digest = hashlib.sha256(f"{seed}:{speaker_index}".encode("utf-8")).digest()
    unit = int.from_bytes(digest[:8], "big") / float(1 << 64)
    low, high = F0_RANGE_HZ
    return low + (high - low) * unit


def noise_signal(n: int, color: NoiseColor, rng: np.random.Generator) -> np.ndarray:
    """
    Unit-power noise of the requested color.

    Pink noise shapes white Gaussian noise by f^-1/2 in amplitude
    (-3 dB/octave in power) in the frequency domain.
    """
    white = rng.standard_normal(n)
    if NoiseColor(color) is NoiseColor.PINK:
        spectrum = np.fft.rfft(white)
        freqs = np.fft.rfftfreq(n, d=1.0 / SAMPLE_RATE)
        shaping = np.zeros_like(freqs)
        shaping[1:] = 1.0 / np.sqrt(freqs[1:])
        white = np.fft.irfft(spectrum * shaping, n=n)
    power = np.mean(white ** 2)
    if power <= 0:
        return white
    return white / np.sqrt(power)


def _syllabic_envelope(n: int) -> np.ndarray:
    t = np.arange(n) / SAMPLE_RATE
    on = np.mod(t, SYLLABLE_PERIOD_S) < SYLLABLE_ON_S
    envelope = np.where(on, 1.0, SYLLABLE_FLOOR)
    width = max(int(round(SMOOTHING_S * SAMPLE_RATE)), 1)
    padded = np.pad(envelope, (width, width), mode="edge")
    envelope = np.convolve(padded, np.ones(width) / width, mode="same")[width:-width]

    fade = min(width, n // 2)
    if fade > 0:
        ramp = 0.5 - 0.5 * np.cos(np.pi * np.arange(fade) / fade)
        envelope[:fade] *= ramp
        envelope[n - fade:] *= ramp[::-1]
    return envelope


def vowel_signal(n: int, f0: float, tilt_db_per_octave: float, rng: np.random.Generator) -> np.ndarray:
    """Harmonic vowel-like signal with vibrato, optional tilt and syllabic envelope."""
    t = np.arange(n) / SAMPLE_RATE
    vibrato = 1.0 + VIBRATO_DEPTH * np.sin(2.0 * np.pi * VIBRATO_RATE_HZ * t)
    base_phase = 2.0 * np.pi * np.cumsum(f0 * vibrato) / SAMPLE_RATE

    n_harmonics = max(int(MAX_HARMONIC_HZ // f0), 1)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_harmonics)
    signal = np.zeros(n)
    for h in range(1, n_harmonics + 1):
        gain = 1.0 / h
        if tilt_db_per_octave:
            gain *= 10.0 ** (tilt_db_per_octave * np.log2(h * f0 / TILT_REFERENCE_HZ) / 20.0)
        signal += gain * np.sin(h * base_phase + phases[h - 1])

    signal *= _syllabic_envelope(n)
    power = np.mean(signal ** 2)
    return signal * np.sqrt(SPEECH_POWER / power)


def synthesize_utterance(
    spec: SynthSpec,
    group: Group,
    speaker_index: int,
    utterance_index: int,
    f0: float,
) -> SynthesizedUtterance:
    """
    Generate one utterance with noise mixed at the group SNR.

    The SNR is 10 log10(speech power / noise power) with both powers taken
    over the true speech region.
    """
    rng = np.random.default_rng([spec.seed, speaker_index, utterance_index])
    lead = int(round(spec.leading_silence_s * SAMPLE_RATE))
    body = int(round(spec.speech_duration_s * SAMPLE_RATE))
    trail = int(round(spec.trailing_silence_s * SAMPLE_RATE))
    total = lead + body + trail

    clean = np.zeros(total)
    clean[lead:lead + body] = vowel_signal(body, f0, spec.tilt_for(group), rng)

    noise = noise_signal(total, spec.noise_color, rng)
    speech_power = np.mean(clean[lead:lead + body] ** 2)
    noise_power = np.mean(noise[lead:lead + body] ** 2)
    target = speech_power / (10.0 ** (spec.snr_for(group) / 10.0))
    noise *= np.sqrt(target / noise_power)

    mixture = clean + noise
    peak = np.max(np.abs(mixture))
    if peak > PEAK_LIMIT:
        scale = PEAK_LIMIT / peak
        clean, noise, mixture = clean * scale, noise * scale, mixture * scale

    return SynthesizedUtterance(
        clean=clean,
        noise=noise,
        mixture=mixture,
        speech_start=lead,
        speech_end=lead + body,
    )


def _speaker_plan(spec: SynthSpec) -> List[Tuple[str, Group, int]]:
    plan = []
    for group in (Group.A, Group.B):
        for local in range(spec.speakers_per_group):
            index = len(plan)
            plan.append((f"spk{group.value}{local:02d}", group, index))
    return plan


def _render_utterance(spec: SynthSpec, out_dir: str, speaker_id: str, group: Group,
                      speaker_index: int, utterance_index: int, f0: float) -> Tuple[str, GroundTruth]:
    stem = f"u{utterance_index:03d}"
    rel_path = f"wav/{speaker_id}/{stem}.wav"
    utt = synthesize_utterance(spec, group, speaker_index, utterance_index, f0)
    write_wav(os.path.join(out_dir, rel_path), utt.mixture)
    truth = GroundTruth(
        utterance_id=f"{speaker_id}/{stem}",
        speaker_id=speaker_id,
        group=group,
        true_snr_db=float(spec.snr_for(group)),
        speech_start_s=utt.speech_start_s,
        speech_end_s=utt.speech_end_s,
        f0_hz=f0,
    )
    return rel_path, truth


def generate_synthetic_corpus(spec: SynthSpec, out_dir: str, n_jobs: int = 1) -> SynthResult:
    """
    Write a synthetic corpus, its manifest and ground-truth sidecar.

    Args:
        spec: Corpus parameters
        out_dir: Output directory (created if missing)
        n_jobs: Parallel writer threads; output bytes do not depend on it

    Returns:
        Paths of the manifest and sidecar plus the ground-truth records
    """
    logger.workflow_step("Synthetic corpus", "STARTED", out_dir=out_dir, seed=spec.seed)
    os.makedirs(out_dir, exist_ok=True)

    jobs = []
    for speaker_id, group, speaker_index in _speaker_plan(spec):
        f0 = speaker_f0(spec.seed, speaker_index)
        for utterance_index in range(spec.utterances_per_speaker):
            jobs.append((speaker_id, group, speaker_index, utterance_index, f0))

    rendered = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_render_utterance)(spec, out_dir, *job) for job in jobs
    )

    manifest_path = os.path.join(out_dir, MANIFEST_NAME)
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("# speaker_id\tgroup\tpath\n")
        for rel_path, truth in rendered:
            handle.write(f"{truth.speaker_id}\t{truth.group.value}\t{rel_path}\n")

    ground_truth = tuple(truth for _, truth in rendered)
    sidecar_path = os.path.join(out_dir, SIDECAR_NAME)
    write_sidecar(ground_truth, sidecar_path)

    logger.workflow_step("Synthetic corpus", "COMPLETED", utterances=len(ground_truth), manifest=manifest_path)
    return SynthResult(manifest_path=manifest_path, sidecar_path=sidecar_path, ground_truth=ground_truth)
