"""
Audit Report Rendering

JSON keeps every number unrounded; the text table shows speaker accuracy
in percent with one decimal as ``mean ± std`` per condition.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import json
from typing import Dict, List, Tuple

from src.modules.corpus.models import Group
from src.modules.evaluation.models import AuditReport, Condition

REPORT_FORMATS = ("json", "text")
COLUMN_ORDER = (Condition.SPEECH, Condition.NONSPEECH, Condition.COMBINED)
MISSING_CELL = "-"


def format_cell(mean: float, std: float) -> str:
    return f"{100.0 * mean:.1f} ± {100.0 * std:.1f}"


def accuracy_row(report: AuditReport, approach) -> str:
    cells = []
    for condition in COLUMN_ORDER:
        result = report.result_for(approach, condition)
        cells.append(MISSING_CELL if result is None else format_cell(result.mean, result.std))
    return " / ".join(cells)


def _render_text(report: AuditReport) -> str:
    approaches = report.approaches()
    width = max([len(a.value) for a in approaches] + [8]) + 2
    lines: List[str] = [
        f"Corpus bias audit: {report.corpus_id}",
        "=" * 72,
        "",
        "Estimated SNR [dB] across all utterances (mean ± std)",
    ]
    for method, stats in sorted(report.snr_stats.items()):
        cells = "   ".join(
            f"{group.value}: {stats[group].mean_db:.1f} ± {stats[group].std_db:.1f}" for group in Group
        )
        lines.append(f"  {method:<{width}}{cells}")

    lines += [
        "",
        "Speaker classification accuracy [%] (mean ± std over seeds)",
        f"  {'approach':<{width}}" + " / ".join(c.value for c in COLUMN_ORDER),
    ]
    for approach in approaches:
        lines.append(f"  {approach.value:<{width}}{accuracy_row(report, approach)}")

    if report.durations:
        speech = sum(d.speech_s for d in report.durations)
        nonspeech = sum(d.nonspeech_s for d in report.durations)
        lines += ["", f"Detected material: speech {speech:.1f} s, non-speech {nonspeech:.1f} s"]

    flags = report.flags
    lines += [
        "",
        f"environment_bias: {'yes' if flags.environment_bias else 'no'}",
        f"snr_gap: {'yes' if flags.snr_gap else 'no'}",
    ]
    return "\n".join(lines) + "\n"


def render_report(report: AuditReport, fmt: str = "json") -> str:
    """
    Serialize a report deterministically.

    Args:
        report: Finished audit report
        fmt: "json" (full precision) or "text" (accuracy table)
    """
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if fmt == "text":
        return _render_text(report)
    raise ValueError(f"Unknown report format '{fmt}', expected one of {REPORT_FORMATS}")


def parse_accuracy_cell(cell: str) -> Tuple[float, float]:
    """Inverse of format_cell, back to fractions."""
    mean, std = (part.strip() for part in cell.split("±"))
    return float(mean) / 100.0, float(std) / 100.0


def parse_text_table(text: str) -> Dict[str, Dict[str, Tuple[float, float]]]:
    """Read the accuracy rows of a text report: approach -> condition -> (mean, std)."""
    rows: Dict[str, Dict[str, Tuple[float, float]]] = {}
    in_table = False
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("approach"):
            in_table = True
            continue
        if in_table:
            if not stripped:
                break
            name, _, cells = stripped.partition(" ")
            rows[name] = {
                condition.value: parse_accuracy_cell(cell)
                for condition, cell in zip(COLUMN_ORDER, cells.strip().split(" / "))
                if cell.strip() != MISSING_CELL
            }
    return rows
