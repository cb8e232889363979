"""
Application Configuration Module

This module contains all configuration settings for the corpus bias auditor.
It centralizes the analysis parameters (VAD, SNR, features, classifiers and
evaluation protocol) and provides easy access to application paths and
environment overrides.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import os
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, Optional, Tuple

from dotenv import load_dotenv

from src.core.exceptions import ConfigError


SAMPLE_RATE = 16000

APPROACHES: Tuple[str, ...] = ("svm_mfcc", "svm_sparsity", "svm_pca_stack", "mlp_mel")
CONDITIONS: Tuple[str, ...] = ("speech", "nonspeech", "combined")


@dataclass(frozen=True)
class VadConfig:
    """Energy VAD settings."""
    threshold_db_over_floor: float = 6.0
    min_speech_ms: float = 100.0
    max_gap_ms: float = 50.0
    hangover_frames: int = 3
    frame_ms: float = 32.0
    hop_ms: float = 16.0
    floor_fraction: float = 0.1  # lowest decile
    median_frames: int = 5

    def __post_init__(self):
        if self.min_speech_ms < 0 or self.max_gap_ms < 0 or self.hangover_frames < 0:
            raise ConfigError("VAD durations and hangover must be non-negative")
        if self.median_frames < 1 or self.median_frames % 2 == 0:
            raise ConfigError("median_frames must be a positive odd count")


@dataclass(frozen=True)
class SnrConfig:
    """Utterance-level SNR estimator settings."""
    method: str = "percentile"
    noise_fraction: float = 0.2  # lowest quintile
    active_factor: float = 2.0
    clamp_db: Tuple[float, float] = (-20.0, 60.0)
    epsilon: float = 1e-12
    energy_split_threshold: float = 0.01


@dataclass(frozen=True)
class FeatureConfig:
    """Handcrafted feature extractor settings."""
    mfcc_window_ms: float = 32.0
    mfcc_hop_ms: float = 16.0
    mfcc_n_filters: int = 26
    mfcc_n_coefficients: int = 12
    sparsity_window_ms: float = 16.0
    sparsity_hop_ms: float = 8.0
    mel_window_ms: float = 32.0
    mel_hop_ms: float = 4.0
    mel_bands: int = 126
    segment_ms: float = 500.0
    segment_shift_ms: float = 250.0
    log_floor: float = 1e-10


@dataclass(frozen=True)
class GridConfig:
    """SVM hyperparameter grid; defaults are the audit protocol grid."""
    c_values: Tuple[float, ...] = (10.0, 1e4)
    gamma_values: Tuple[float, ...] = (1e-4, 1e-1)
    tol: float = 1e-3
    max_passes: int = 20


@dataclass(frozen=True)
class MlpConfig:
    """Two-layer perceptron training settings."""
    hidden_units: int = 256
    epochs: int = 50
    batch_size: int = 128
    learning_rate: float = 1e-3
    scheduler_patience: int = 5


@dataclass
class AuditConfig:
    """
    Full audit run configuration.

    Defaults reproduce the leave-one-speaker-out protocol: the 2x2 SVM grid,
    three seeds and a 90/10 train/validation split.
    """
    manifest: str = ""
    output_dir: str = "reports"
    model_dir: str = ""  # per-fold model files are written only when set
    report_name: str = "corpus"
    corpus_id: str = ""
    approaches: Tuple[str, ...] = APPROACHES
    conditions: Tuple[str, ...] = CONDITIONS
    seeds: Tuple[int, ...] = (17, 42, 1337)
    val_fraction: float = 0.1
    vad: VadConfig = field(default_factory=VadConfig)
    snr: SnrConfig = field(default_factory=SnrConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    mlp: MlpConfig = field(default_factory=MlpConfig)
    threads: int = 0

    def __post_init__(self):
        unknown = [a for a in self.approaches if a not in APPROACHES]
        if unknown:
            raise ConfigError(f"Unknown approaches: {unknown}")
        unknown = [c for c in self.conditions if c not in CONDITIONS]
        if unknown:
            raise ConfigError(f"Unknown conditions: {unknown}")
        if not self.seeds:
            raise ConfigError("At least one seed is required")
        if not 0.0 < self.val_fraction < 1.0:
            raise ConfigError("val_fraction must lie in (0, 1)")

    def snapshot(self) -> Dict[str, Any]:
        """Return a JSON-serializable copy of the configuration."""
        data = asdict(self)
        data.pop("threads", None)
        return data


@dataclass
class ApplicationPaths:
    """File and directory paths used by the application."""

    def __init__(self):
        self.project_root = self._get_project_root()
        self.logs_directory = os.path.join(self.project_root, 'logs')

    def _get_project_root(self) -> str:
        """Get the absolute path to the project root directory."""
        current_file = os.path.abspath(__file__)
        return os.path.dirname(os.path.dirname(current_file))

    def ensure_logs_directory(self) -> str:
        """Create the logs directory on demand and return it."""
        os.makedirs(self.logs_directory, exist_ok=True)
        return self.logs_directory


class ApplicationConfig:
    """
    Main application configuration class.

    Reads environment overrides (optionally from a ``.env`` file) and exposes
    them together with the application paths.
    """

    def __init__(self):
        load_dotenv()
        self.paths = ApplicationPaths()
        self.environment = os.getenv('AUDIT_ENV', 'development').lower()
        self.enable_file_logging = os.getenv('AUDIT_FILE_LOGGING', '0').lower() in ('1', 'true', 'yes')
        self.enable_detailed_logging = self.environment == 'development'
        self.threads = self._read_threads()

    def _read_threads(self) -> int:
        """
        Read the AUDIT_THREADS cap.

        Returns:
            Requested worker count; 0 means one worker per CPU
        """
        raw = os.getenv('AUDIT_THREADS', '0').strip() or '0'
        try:
            value = int(raw)
        except ValueError:
            return 0
        return max(value, 0)

    def worker_count(self, requested: Optional[int] = None) -> int:
        """
        Resolve the number of parallel workers.

        Args:
            requested: Explicit count; AUDIT_THREADS caps it when both are positive

        Returns:
            A positive worker count
        """
        candidates = [v for v in (requested or 0, self.threads) if v > 0]
        if not candidates:
            return os.cpu_count() or 1
        return min(candidates)
