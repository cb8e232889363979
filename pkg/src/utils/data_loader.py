"""
Data Loader Module

This module handles loading and validation of audit inputs: the flat
``key=value`` audit configuration file, JSON documents and the synthetic
ground-truth sidecar.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import json
import os
from dataclasses import replace
from typing import Any, Dict, List, Mapping, Optional

from dotenv import dotenv_values

from src.config import AuditConfig
from src.core.exceptions import ConfigError
from src.modules.corpus.manifest import load_sidecar
from src.modules.corpus.models import GroundTruth
from src.utils.logger import ApplicationLogger

CONFIG_KEYS = (
    "manifest",
    "output_dir",
    "model_dir",
    "report_name",
    "corpus_id",
    "approaches",
    "conditions",
    "seeds",
    "grid_c",
    "grid_gamma",
    "grid_max_passes",
    "vad_threshold_db",
    "vad_min_speech_ms",
    "vad_max_gap_ms",
    "vad_hangover_frames",
    "val_fraction",
    "mlp_epochs",
    "mlp_batch_size",
    "mlp_learning_rate",
    "threads",
)


def _split_list(raw: str) -> List[str]:
    return [part.strip() for part in raw.split(",") if part.strip()]


class DataLoader:
    """
    Loads audit configuration and auxiliary data files.

    Config values are strings as read from the file; CLI overrides use the
    same keys and win over file values.
    """

    def __init__(self):
        """Initialize the data loader."""
        self.logger = ApplicationLogger("DataLoader")

    def load_audit_config(self, path: Optional[str] = None,
                          overrides: Optional[Mapping[str, Any]] = None) -> AuditConfig:
        """
        Build an AuditConfig from an optional config file plus overrides.

        Args:
            path: Flat key=value file; relative manifest / output paths resolve against its directory
            overrides: Values taking precedence over the file (None values are ignored)

        Returns:
            Validated AuditConfig

        Raises:
            ConfigError: Missing file, unknown key or unparsable value
        """
        values: Dict[str, Any] = {}
        base_dir = ""
        if path:
            if not os.path.exists(path):
                raise ConfigError(f"config file not found: {path}")
            self.logger.info("Loading audit configuration", path=path)
            values.update({k: v for k, v in dotenv_values(path).items() if v is not None})
            base_dir = os.path.dirname(os.path.abspath(path))
            for key in ("manifest", "output_dir", "model_dir"):
                if values.get(key) and not os.path.isabs(values[key]):
                    values[key] = os.path.join(base_dir, values[key])
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})

        unknown = sorted(set(values) - set(CONFIG_KEYS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        config = self.build_audit_config(values)
        if not config.manifest:
            raise ConfigError("no manifest configured")
        return config

    def build_audit_config(self, values: Mapping[str, Any]) -> AuditConfig:
        """Convert raw key / value pairs into an AuditConfig."""
        try:
            base = AuditConfig()
            vad = replace(
                base.vad,
                **{
                    field: cast(values[key])
                    for key, field, cast in (
                        ("vad_threshold_db", "threshold_db_over_floor", float),
                        ("vad_min_speech_ms", "min_speech_ms", float),
                        ("vad_max_gap_ms", "max_gap_ms", float),
                        ("vad_hangover_frames", "hangover_frames", int),
                    )
                    if key in values
                },
            )
            grid = replace(
                base.grid,
                **{
                    field: tuple(float(v) for v in self._as_list(values[key]))
                    for key, field in (("grid_c", "c_values"), ("grid_gamma", "gamma_values"))
                    if key in values
                },
            )
            if "grid_max_passes" in values:
                grid = replace(grid, max_passes=int(values["grid_max_passes"]))
            mlp = replace(
                base.mlp,
                **{
                    field: cast(values[key])
                    for key, field, cast in (
                        ("mlp_epochs", "epochs", int),
                        ("mlp_batch_size", "batch_size", int),
                        ("mlp_learning_rate", "learning_rate", float),
                    )
                    if key in values
                },
            )
            scalars: Dict[str, Any] = {}
            for key in ("manifest", "output_dir", "model_dir", "report_name", "corpus_id"):
                if key in values:
                    scalars[key] = str(values[key])
            if "approaches" in values:
                scalars["approaches"] = tuple(self._as_list(values["approaches"]))
            if "conditions" in values:
                scalars["conditions"] = tuple(self._as_list(values["conditions"]))
            if "seeds" in values:
                scalars["seeds"] = tuple(int(v) for v in self._as_list(values["seeds"]))
            if "val_fraction" in values:
                scalars["val_fraction"] = float(values["val_fraction"])
            if "threads" in values:
                scalars["threads"] = int(values["threads"])
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid config value: {exc}") from exc

        if not grid.c_values or not grid.gamma_values:
            raise ConfigError("grid_c and grid_gamma need at least one value")
        if grid.max_passes < 1:
            raise ConfigError("grid_max_passes must be at least 1")
        return AuditConfig(vad=vad, grid=grid, mlp=mlp, **scalars)

    @staticmethod
    def _as_list(raw: Any) -> List[str]:
        if isinstance(raw, str):
            return _split_list(raw)
        return [str(v) for v in raw]

    def load_json(self, path: str) -> Any:
        """
        Load a JSON document.

        Raises:
            FileNotFoundError: Missing file
            ConfigError: Invalid JSON
        """
        try:
            with open(path, "r", encoding="utf-8") as handle:
                return json.load(handle)
        except json.JSONDecodeError as exc:
            self.logger.error("Invalid JSON document", exception=exc, path=path)
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc

    def load_ground_truth(self, path: str) -> List[GroundTruth]:
        """Sidecar records written by the synthetic corpus generator."""
        records = load_sidecar(path)
        self.logger.info("Ground truth loaded", path=path, records=len(records))
        return records

