"""
Audit Exceptions Module

Named error hierarchy shared by every part of the corpus bias auditor.
Each error also derives from the closest builtin so callers can catch
either the specific audit error or the generic Python one.

Author: Corpus Audit Team
Date: October 18, 2026
"""


class AuditError(Exception):
    """Base class for every error raised by the auditor."""


# Manifest errors

class ManifestError(AuditError, ValueError):
    """A corpus manifest could not be turned into speaker records."""


class ManifestNotFoundError(AuditError, FileNotFoundError):
    """The manifest file does not exist."""


class DuplicateSpeakerError(ManifestError):
    """A speaker id appears in more than one manifest block."""


class UnknownGroupError(ManifestError):
    """A manifest line carries a group token other than A or B."""


class EmptyManifestError(ManifestError):
    """The manifest holds no records after comments are removed."""


class MissingGroupError(ManifestError):
    """One of the two groups has no speakers."""


# Audio errors

class WavFormatError(AuditError, ValueError):
    """A WAV file is not 16 kHz PCM16 mono."""


class SampleRateError(WavFormatError):
    """The WAV sample rate is not 16000 Hz."""


class ChannelCountError(WavFormatError):
    """The WAV file is not mono."""


class BitDepthError(WavFormatError):
    """The WAV payload is not 16-bit PCM."""


class TruncatedWavError(WavFormatError):
    """The payload holds fewer frames than the header declares."""


# Signal and feature errors

class SignalTooShortError(AuditError, ValueError):
    """A signal is shorter than the analysis it is fed to requires."""


class SpanBoundsError(AuditError, ValueError):
    """A segment span lies outside its utterance."""


class FrequencyRangeError(AuditError, ValueError):
    """A Mel filterbank frequency range is invalid."""


class DimensionMismatchError(AuditError, ValueError):
    """Vector or matrix dimensions disagree with a fitted state."""


class InsufficientDataError(AuditError, ValueError):
    """Too few samples, vectors or speakers for the requested operation."""


class NonFiniteFeatureError(AuditError, ValueError):
    """A feature matrix contains NaN or infinite values."""


# Training and evaluation errors

class SingleClassError(AuditError, ValueError):
    """Training data contains only one class."""


class EmptyGroupError(AuditError, ValueError):
    """A speaker group has no utterances to summarise."""


class MissingConditionError(AuditError, ValueError):
    """Condition results needed for a comparison are absent."""


class ModelFormatError(AuditError, ValueError):
    """A serialized model container is malformed or of the wrong version."""


class ConfigError(AuditError, ValueError):
    """An audit configuration file or override is invalid."""
