"""
Evaluation Module

Leave-one-speaker-out protocol, condition comparison and audit reports.
"""

from .folds import majority_vote, make_loso_folds
from .models import (
    Approach,
    AuditFlags,
    AuditReport,
    Condition,
    ConditionResult,
    Fold,
    FoldOutcome,
    LabeledItem,
)
from .report import REPORT_FORMATS, format_cell, parse_text_table, render_report
from .runner import (
    build_items,
    compare_conditions,
    condition_signal,
    fit_fold_classifier,
    fold_model_path,
    run_audit,
    run_condition,
    run_fold,
    segment_corpus,
)

__all__ = [
    "REPORT_FORMATS",
    "Approach",
    "AuditFlags",
    "AuditReport",
    "Condition",
    "ConditionResult",
    "Fold",
    "FoldOutcome",
    "LabeledItem",
    "build_items",
    "compare_conditions",
    "condition_signal",
    "fit_fold_classifier",
    "fold_model_path",
    "format_cell",
    "majority_vote",
    "make_loso_folds",
    "parse_text_table",
    "render_report",
    "run_audit",
    "run_condition",
    "run_fold",
    "segment_corpus",
]
