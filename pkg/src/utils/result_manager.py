"""
Result Manager Module

This module handles saving and display of audit results: the report
files, the per-utterance SNR CSV and the console summary.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import os
from typing import Dict, List, Mapping, Sequence, Tuple

import pandas as pd

from src.modules.corpus.models import Group
from src.modules.evaluation.models import AuditReport
from src.modules.evaluation.report import accuracy_row, render_report
from src.modules.segmentation.snr import GroupSnrStats
from src.utils.logger import ApplicationLogger

SNR_COLUMNS = ["utterance_id", "speaker_id", "group", "snr_db", "n_noise_frames", "n_active_frames"]


class ResultManager:
    """
    Manages audit results including saving and display.

    Every writer produces byte-identical files for identical inputs.
    """

    def __init__(self):
        """Initialize the result manager."""
        self.logger = ApplicationLogger("ResultManager")

    def save_audit_report(self, report: AuditReport, output_dir: str, name: str) -> Tuple[str, str]:
        """
        Write ``<name>.audit.json`` and ``<name>.audit.txt``.

        Returns:
            Paths of the JSON and text files
        """
        os.makedirs(output_dir, exist_ok=True)
        paths = (
            os.path.join(output_dir, f"{name}.audit.json"),
            os.path.join(output_dir, f"{name}.audit.txt"),
        )
        for path, fmt in zip(paths, ("json", "text")):
            try:
                with open(path, "w", encoding="utf-8", newline="\n") as handle:
                    handle.write(render_report(report, fmt))
            except OSError as exc:
                self.logger.error("Failed to write audit report", exception=exc, path=path)
                raise
        self.logger.success("Audit report saved", json=paths[0], text=paths[1])
        return paths

    def save_snr_table(self, rows: Sequence[Mapping[str, object]], path: str) -> str:
        """Write the per-utterance SNR CSV."""
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        pd.DataFrame(list(rows), columns=SNR_COLUMNS).to_csv(path, index=False, float_format="%.17g")
        self.logger.success("SNR table saved", path=path, rows=len(rows))
        return path

    def display_snr_summary(self, stats_by_method: Mapping[str, Mapping[Group, GroupSnrStats]]):
        """Print the per-group SNR summary."""
        print("\n" + "=" * 80)
        print("📊 UTTERANCE-LEVEL SNR PER GROUP")
        print("=" * 80)
        self._print_snr_lines(stats_by_method)
        print("=" * 80)

    @staticmethod
    def _print_snr_lines(stats_by_method: Mapping[str, Mapping[Group, GroupSnrStats]]):
        for method, stats in sorted(stats_by_method.items()):
            print(f"\n📈 SNR ({method}):")
            for group in Group:
                s = stats[group]
                print(f"   Group {group.value}: {s.mean_db:.1f} ± {s.std_db:.1f} dB ({s.n_utterances} utterances)")

    def display_audit_summary(self, report: AuditReport):
        """
        Display a formatted summary of an audit.

        Args:
            report: Finished audit report
        """
        print("\n" + "=" * 80)
        print(f"🔍 CORPUS BIAS AUDIT - {report.corpus_id}")
        print("=" * 80)

        self._print_snr_lines(report.snr_stats)

        print(f"\n🎯 Speaker Classification Accuracy [%] (speech / nonspeech / combined):")
        for approach in report.approaches():
            print(f"   {approach.value:<16}{accuracy_row(report, approach)}")

        flags = report.flags
        print(f"\n🚩 Flags:")
        print(f"   Environment bias: {'⚠️  Yes' if flags.environment_bias else '✅ No'}")
        print(f"   SNR gap: {'⚠️  Yes' if flags.snr_gap else '✅ No'}")
        print("=" * 80)

    def save_group_summary(self, stats_by_method: Mapping[str, Mapping[Group, GroupSnrStats]], path: str) -> str:
        """Write the per-group SNR statistics, one row per (method, group)."""
        rows: List[Dict[str, object]] = [
            {"method": method, "group": group.value, "mean_db": stats[group].mean_db,
             "std_db": stats[group].std_db, "n_utterances": stats[group].n_utterances}
            for method, stats in sorted(stats_by_method.items())
            for group in Group
        ]
        pd.DataFrame(rows).to_csv(path, index=False, float_format="%.17g")
        self.logger.success("SNR group summary saved", path=path)
        return path
