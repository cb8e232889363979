"""
Corpus Bias Auditor - Main Entry Point

This module serves as the command-line entry point of the auditor. It
orchestrates corpus synthesis, segmentation, SNR analysis, feature
extraction and the full leave-one-speaker-out audit.

Exit codes: 0 success, 2 environment bias detected (audit), 1 error.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import argparse
import os
import sys
from typing import Dict, Optional, Sequence

from src import __description__, __version__
from src.config import APPROACHES, CONDITIONS, AuditConfig, ApplicationConfig, VadConfig
from src.core.exceptions import AuditError, SignalTooShortError
from src.modules.corpus import SynthSpec, generate_synthetic_corpus, load_corpus
from src.modules.corpus.models import NoiseColor
from src.modules.evaluation import Condition, condition_signal, render_report, run_audit, segment_corpus
from src.modules.features import FeatureKind, dump_features, extract
from src.modules.segmentation import SNR_METHODS, dump_segments, estimate_utterance_snr, group_snr_stats, snr_table
from src.utils.data_loader import DataLoader
from src.utils.logger import ApplicationLogger
from src.utils.result_manager import ResultManager

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BIAS = 2


class AuditArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with 1; 2 signals detected bias."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


class CorpusAuditApplication:
    """
    Main orchestrator of the auditor's commands.

    Each ``cmd_*`` method takes parsed arguments and returns an exit code.
    """

    def __init__(self):
        """Initialize the application."""
        self.config = ApplicationConfig()
        self.logger = ApplicationLogger()
        self.data_loader = DataLoader()
        self.result_manager = ResultManager()

    @staticmethod
    def _vad_config(args: argparse.Namespace) -> VadConfig:
        return VadConfig(
            threshold_db_over_floor=args.vad_threshold_db,
            min_speech_ms=args.vad_min_speech_ms,
            max_gap_ms=args.vad_max_gap_ms,
            hangover_frames=args.vad_hangover_frames,
        )

    def cmd_synth(self, args: argparse.Namespace) -> int:
        spec = SynthSpec(
            speakers_per_group=args.speakers,
            utterances_per_speaker=args.utts,
            snr_db_group_a=args.snr_a,
            snr_db_group_b=args.snr_b,
            tilt_db_per_octave_group_b=args.tilt_b,
            speech_duration_s=args.speech_s,
            leading_silence_s=args.lead_s,
            trailing_silence_s=args.trail_s,
            noise_color=NoiseColor(args.noise),
            seed=args.seed,
        )
        result = generate_synthetic_corpus(spec, args.out, n_jobs=self.config.worker_count(args.threads))
        print(result.manifest_path)
        return EXIT_OK

    def cmd_vad(self, args: argparse.Namespace) -> int:
        corpus = load_corpus(args.manifest)
        spans = segment_corpus(corpus, AuditConfig(manifest=args.manifest, vad=self._vad_config(args)))
        dump_segments(spans, args.out)
        self.logger.success("Segments written", path=args.out, utterances=len(spans))
        print(args.out)
        return EXIT_OK

    def cmd_snr(self, args: argparse.Namespace) -> int:
        corpus = load_corpus(args.manifest)
        stats_by_method = {}
        estimates_by_method = {}
        for method in SNR_METHODS:
            estimates = {utt.utterance_id: estimate_utterance_snr(utt, method) for utt in corpus.utterances()}
            estimates_by_method[method] = estimates
            stats_by_method[method] = group_snr_stats(corpus, estimates)

        self.result_manager.save_snr_table(snr_table(corpus, estimates_by_method[args.method]), args.out)
        summary_path = os.path.splitext(args.out)[0] + "_groups.csv"
        self.result_manager.save_group_summary(stats_by_method, summary_path)
        self.result_manager.display_snr_summary(stats_by_method)
        return EXIT_OK

    def cmd_features(self, args: argparse.Namespace) -> int:
        corpus = load_corpus(args.manifest)
        condition = Condition(args.condition)
        spans = None
        if condition is not Condition.COMBINED:
            spans = segment_corpus(corpus, AuditConfig(manifest=args.manifest, vad=self._vad_config(args)))

        vectors = []
        for utt in corpus.utterances():
            signal = condition_signal(utt, None if spans is None else spans[utt.utterance_id], condition)
            if signal.shape[0] == 0:
                self.logger.warning("Skipping utterance with empty condition signal", utterance=utt.utterance_id)
                continue
            try:
                vectors.append(extract(FeatureKind(args.kind), signal, utt.utterance_id, utt.speaker_id))
            except SignalTooShortError as exc:
                self.logger.warning("Skipping utterance too short for feature extraction",
                                    utterance=utt.utterance_id, reason=str(exc))
        dump_features(vectors, args.out)
        self.logger.success("Features written", path=args.out, vectors=len(vectors), kind=args.kind)
        print(args.out)
        return EXIT_OK

    def cmd_audit(self, args: argparse.Namespace) -> int:
        overrides: Dict[str, Optional[str]] = {
            "manifest": args.manifest,
            "output_dir": args.output_dir,
            "model_dir": args.model_dir,
            "report_name": args.report_name,
            "corpus_id": args.corpus_id,
            "approaches": args.approaches,
            "conditions": args.conditions,
            "seeds": args.seeds,
            "grid_c": args.grid_c,
            "grid_gamma": args.grid_gamma,
            "grid_max_passes": args.grid_max_passes,
            "vad_threshold_db": args.vad_threshold_db,
            "vad_min_speech_ms": args.vad_min_speech_ms,
            "vad_max_gap_ms": args.vad_max_gap_ms,
            "vad_hangover_frames": args.vad_hangover_frames,
            "val_fraction": args.val_fraction,
            "mlp_epochs": args.mlp_epochs,
            "mlp_batch_size": args.mlp_batch_size,
            "mlp_learning_rate": args.mlp_learning_rate,
            "threads": args.threads,
        }
        config = self.data_loader.load_audit_config(args.config, overrides)
        report = run_audit(config)
        self.result_manager.save_audit_report(report, config.output_dir, config.report_name)
        self.result_manager.display_audit_summary(report)
        if args.print_json:
            print(render_report(report, "json"), end="")
        return EXIT_BIAS if report.flags.environment_bias else EXIT_OK

    def run(self, args: argparse.Namespace) -> int:
        """Dispatch a parsed command, mapping failures to exit code 1."""
        handler = getattr(self, f"cmd_{args.command}")
        try:
            return handler(args)
        except (AuditError, OSError) as exc:
            self.logger.failure(f"{args.command} failed: {exc}")
            return EXIT_ERROR


def _add_vad_flags(parser: argparse.ArgumentParser, defaults: Optional[VadConfig]):
    """VAD flags; with defaults=None the values stay None so a config file can supply them."""
    pinned = VadConfig()
    for flag, field, kind in (
        ("--vad-threshold-db", "threshold_db_over_floor", float),
        ("--vad-min-speech-ms", "min_speech_ms", float),
        ("--vad-max-gap-ms", "max_gap_ms", float),
        ("--vad-hangover-frames", "hangover_frames", int),
    ):
        value = getattr(pinned, field)
        if defaults is None:
            parser.add_argument(flag, type=kind, default=None, help=f"VAD {field} (default: {value})")
        else:
            parser.add_argument(flag, type=kind, default=getattr(defaults, field), help=f"VAD {field}")


def build_parser() -> argparse.ArgumentParser:
    """Build the command-line parser with one sub-command per pipeline stage."""
    parser = AuditArgumentParser(prog="corpus-audit", description=__description__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=AuditArgumentParser)
    with_defaults = argparse.ArgumentDefaultsHelpFormatter

    synth = commands.add_parser("synth", help="generate a planted-bias synthetic corpus", formatter_class=with_defaults)
    pinned = SynthSpec()
    synth.add_argument("--out", default="synthetic_corpus", help="output directory")
    synth.add_argument("--speakers", type=int, default=pinned.speakers_per_group, help="speakers per group")
    synth.add_argument("--utts", type=int, default=pinned.utterances_per_speaker, help="utterances per speaker")
    synth.add_argument("--snr-a", type=float, default=pinned.snr_db_group_a, help="group A SNR in dB")
    synth.add_argument("--snr-b", type=float, default=pinned.snr_db_group_b, help="group B SNR in dB")
    synth.add_argument("--tilt-b", type=float, default=pinned.tilt_db_per_octave_group_b,
                       help="group B in-speech spectral tilt in dB/octave")
    synth.add_argument("--speech-s", type=float, default=pinned.speech_duration_s, help="speech duration")
    synth.add_argument("--lead-s", type=float, default=pinned.leading_silence_s, help="leading silence")
    synth.add_argument("--trail-s", type=float, default=pinned.trailing_silence_s, help="trailing silence")
    synth.add_argument("--noise", choices=[c.value for c in NoiseColor], default=pinned.noise_color.value,
                       help="noise color")
    synth.add_argument("--seed", type=int, default=pinned.seed, help="generator seed")
    synth.add_argument("--threads", type=int, default=0, help="writer threads (0 = AUDIT_THREADS or CPU count)")

    vad = commands.add_parser("vad", help="write speech / non-speech segments as JSON", formatter_class=with_defaults)
    vad.add_argument("manifest", help="corpus manifest")
    vad.add_argument("--out", default="segments.json", help="segment dump path")
    _add_vad_flags(vad, VadConfig())

    snr = commands.add_parser("snr", help="per-utterance SNR CSV and per-group summary", formatter_class=with_defaults)
    snr.add_argument("manifest", help="corpus manifest")
    snr.add_argument("--out", default="snr.csv", help="per-utterance CSV path")
    snr.add_argument("--method", choices=SNR_METHODS, default=SNR_METHODS[0], help="estimator of the CSV column")

    features = commands.add_parser("features", help="dump feature vectors as CSV", formatter_class=with_defaults)
    features.add_argument("manifest", help="corpus manifest")
    features.add_argument("--kind", choices=[k.value for k in FeatureKind], default=FeatureKind.MFCC_STATS.value, help="feature kind")
    features.add_argument("--condition", choices=CONDITIONS, default="combined", help="signal condition")
    features.add_argument("--out", default="features.csv", help="CSV path")
    _add_vad_flags(features, VadConfig())

    audit = commands.add_parser("audit", help="run the full leave-one-speaker-out audit")
    pinned_audit = AuditConfig()
    audit.add_argument("--config", default=None, help="flat key=value config file (default: none)")
    audit.add_argument("--manifest", default=None, help="corpus manifest (overrides the config file)")
    audit.add_argument("--output-dir", default=None, help=f"report directory (default: {pinned_audit.output_dir})")
    audit.add_argument("--model-dir", default=None, help="keep every fold model as JSON under this directory")
    audit.add_argument("--report-name", default=None, help=f"report file stem (default: {pinned_audit.report_name})")
    audit.add_argument("--corpus-id", default=None, help="corpus id shown in the report (default: report name)")
    audit.add_argument("--approaches", default=None, help=f"comma list (default: {','.join(APPROACHES)})")
    audit.add_argument("--conditions", default=None, help=f"comma list (default: {','.join(CONDITIONS)})")
    audit.add_argument("--seeds", default=None,
                       help=f"comma list (default: {','.join(str(s) for s in pinned_audit.seeds)})")
    audit.add_argument("--grid-c", default=None,
                       help=f"SVM C values (default: {','.join(f'{v:g}' for v in pinned_audit.grid.c_values)})")
    audit.add_argument("--grid-gamma", default=None,
                       help=f"RBF gamma values (default: {','.join(f'{v:g}' for v in pinned_audit.grid.gamma_values)})")
    audit.add_argument("--grid-max-passes", type=int, default=None,
                       help=f"SMO iteration budget in multiples of n (default: {pinned_audit.grid.max_passes})")
    audit.add_argument("--val-fraction", type=float, default=None,
                       help=f"validation share of each fold (default: {pinned_audit.val_fraction})")
    audit.add_argument("--mlp-epochs", type=int, default=None, help=f"MLP epochs (default: {pinned_audit.mlp.epochs})")
    audit.add_argument("--mlp-batch-size", type=int, default=None,
                       help=f"MLP batch size (default: {pinned_audit.mlp.batch_size})")
    audit.add_argument("--mlp-learning-rate", type=float, default=None,
                       help=f"MLP learning rate (default: {pinned_audit.mlp.learning_rate:g})")
    audit.add_argument("--threads", type=int, default=None, help="worker cap (default: AUDIT_THREADS, 0 = auto)")
    audit.add_argument("--print-json", action="store_true", help="also print the JSON report to stdout")
    _add_vad_flags(audit, None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point of the corpus bias auditor.

    Args:
        argv: Command-line arguments without the program name

    Returns:
        Process exit code
    """
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    application = CorpusAuditApplication()
    try:
        return application.run(args)
    except KeyboardInterrupt:
        print("\n⚠️  Interrupted by user.", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    """
    Entry point when the module is run directly:

        python -m src.main audit --manifest corpus/manifest.tsv
    """
    sys.exit(main())
