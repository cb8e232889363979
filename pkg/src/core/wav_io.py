"""
WAV Codec Module

Strict reader and writer for the only audio format the auditor accepts:
RIFF WAV, PCM 16-bit little-endian, mono, 16000 Hz.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import os
import wave

import numpy as np
import soundfile as sf

from src.config import SAMPLE_RATE
from src.core.exceptions import (
    BitDepthError,
    ChannelCountError,
    SampleRateError,
    TruncatedWavError,
    WavFormatError,
)

PCM_SCALE = 32768.0


def _declared_frames(path: str) -> int:
    """Frame count stated by the RIFF header, independent of the payload size."""
    try:
        with wave.open(path, "rb") as handle:
            return handle.getnframes()
    except (wave.Error, EOFError) as exc:
        raise WavFormatError(f"{path}: unreadable WAV header ({exc})") from exc


def read_wav_samples(path: str) -> np.ndarray:
    """
    Read a 16 kHz PCM16 mono WAV file.

    Args:
        path: Path of the WAV file

    Returns:
        float64 samples scaled by 1/32768 into [-1, 1)

    Raises:
        SampleRateError, ChannelCountError, BitDepthError, TruncatedWavError
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    try:
        info = sf.info(path)
    except RuntimeError as exc:
        raise WavFormatError(f"{path}: not a readable audio file ({exc})") from exc

    if info.format != "WAV":
        raise WavFormatError(f"{path}: container is {info.format}, expected WAV")
    if info.samplerate != SAMPLE_RATE:
        raise SampleRateError(f"{path}: sample rate {info.samplerate} Hz, expected {SAMPLE_RATE} Hz")
    if info.channels != 1:
        raise ChannelCountError(f"{path}: {info.channels} channels, expected mono")
    if info.subtype != "PCM_16":
        raise BitDepthError(f"{path}: subtype {info.subtype}, expected PCM_16")

    declared = _declared_frames(path)
    data, _ = sf.read(path, dtype="int16", always_2d=False)
    if data.shape[0] < declared:
        raise TruncatedWavError(f"{path}: header declares {declared} frames, payload holds {data.shape[0]}")
    return data[:declared].astype(np.float64) / PCM_SCALE


def to_pcm16(samples: np.ndarray) -> np.ndarray:
    """Quantize float samples to int16 with rounding and clipping."""
    scaled = np.round(np.asarray(samples, dtype=np.float64) * PCM_SCALE)
    return np.clip(scaled, -32768, 32767).astype(np.int16)


def write_wav_samples(path: str, samples: np.ndarray) -> None:
    """
    Write mono samples as a 16 kHz PCM16 WAV file.

    Values read back by read_wav_samples reproduce the payload bit-exactly.
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    sf.write(path, to_pcm16(samples), SAMPLE_RATE, subtype="PCM_16", format="WAV")
