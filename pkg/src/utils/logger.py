"""
Application Logger Module

Console (and optional file) logging for the corpus bias auditor. Keyword
context such as utterance ids, fold numbers or seeds is rendered as sorted
``key=value`` pairs so log lines of parallel workers stay comparable.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import logging
import os
import sys
from datetime import datetime
from typing import Any, Dict, Mapping, Optional

from src.config import ApplicationConfig

CONSOLE_FORMAT = "%(asctime)s | %(levelname)-8s | %(message)s%(context)s"
FILE_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(funcName)s:%(lineno)d | %(message)s%(context)s"

STEP_LEVELS: Dict[str, int] = {
    "STARTED": logging.INFO,
    "COMPLETED": logging.INFO,
    "SKIPPED": logging.WARNING,
    "FAILED": logging.ERROR,
}


def render_context(context: Mapping[str, Any]) -> str:
    """`` | key=value ...`` suffix; floats are shortened, order is alphabetical."""
    if not context:
        return ""
    parts = []
    for key in sorted(context):
        value = context[key]
        if isinstance(value, float):
            value = f"{value:.4g}"
        parts.append(f"{key}={value}")
    return " | " + " ".join(parts)


class ContextFormatter(logging.Formatter):
    """Formatter that fills ``%(context)s`` from the ``audit_context`` extra."""

    def format(self, record: logging.LogRecord) -> str:
        record.context = render_context(getattr(record, "audit_context", {}))
        return super().format(record)


class ApplicationLogger:
    """
    Named logger with emoji-tagged helpers for pipeline stages.

    Several instances may share a name; handlers are attached once per name.
    """

    def __init__(self, logger_name: str = "CorpusAudit"):
        self.config = ApplicationConfig()
        self.logger_name = logger_name
        self.logger = self._setup_logger()

    def _setup_logger(self) -> logging.Logger:
        logger = logging.getLogger(self.logger_name)
        logger.setLevel(logging.DEBUG if self.config.enable_detailed_logging else logging.INFO)
        logger.propagate = False
        if logger.handlers:
            return logger

        console = logging.StreamHandler(sys.stderr)
        console.setLevel(logging.INFO)
        console.setFormatter(ContextFormatter(CONSOLE_FORMAT, datefmt="%H:%M:%S"))
        logger.addHandler(console)

        if self.config.enable_file_logging:
            target = logging.FileHandler(self._log_file_path(), encoding="utf-8")
            target.setLevel(logging.DEBUG)
            target.setFormatter(ContextFormatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
            logger.addHandler(target)
        return logger

    def _log_file_path(self) -> str:
        """``logs/corpus_audit_<timestamp>.log`` under the project root."""
        stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        return os.path.join(self.config.paths.ensure_logs_directory(), f"corpus_audit_{stamp}.log")

    def _emit(self, level: int, message: str, context: Dict[str, Any]):
        self.logger.log(level, message, extra={"audit_context": context}, stacklevel=3)

    def debug(self, message: str, **context):
        self._emit(logging.DEBUG, message, context)

    def info(self, message: str, **context):
        self._emit(logging.INFO, message, context)

    def warning(self, message: str, **context):
        self._emit(logging.WARNING, f"⚠️  {message}", context)

    def error(self, message: str, exception: Optional[BaseException] = None, **context):
        """
        Log an error, naming the exception type when one is given.

        Args:
            message: What failed
            exception: Caught exception, rendered as ``Type: text``
            **context: Identifiers of the failing item
        """
        if exception is not None:
            message = f"{message} | {type(exception).__name__}: {exception}"
        self._emit(logging.ERROR, message, context)

    def success(self, message: str, **context):
        self._emit(logging.INFO, f"✅ SUCCESS: {message}", context)

    def failure(self, message: str, **context):
        self._emit(logging.ERROR, f"❌ FAILURE: {message}", context)

    def workflow_step(self, step_name: str, status: str = "STARTED", **context):
        """
        Log a pipeline stage transition.

        Args:
            step_name: Stage name, e.g. "Synthetic corpus" or "svm_mfcc/nonspeech"
            status: STARTED, COMPLETED, SKIPPED or FAILED
            **context: Stage parameters
        """
        status = status.upper()
        self._emit(STEP_LEVELS.get(status, logging.INFO), f"🔄 STEP: {step_name} - {status}", context)

    def performance_metric(self, metric_name: str, value: float, unit: str = "s", **context):
        self._emit(logging.INFO, f"📊 PERFORMANCE: {metric_name} = {value:.3f}{unit}", context)
