"""
Audit Runner

Runs the leave-one-speaker-out protocol for every (approach, condition)
pair and condenses the results into bias flags and an AuditReport.

Work units are (seed, fold) pairs executed through joblib; outcomes are
keyed by (seed, test speaker) and sorted before aggregation, so the
completion order never reaches the report.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import os
import time
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.config import ApplicationConfig, AuditConfig, FeatureConfig
from src.core.exceptions import AuditError, InsufficientDataError, MissingConditionError, SignalTooShortError
from src.modules.classifiers.mlp import mlp_train
from src.modules.classifiers.persistence import TrainedClassifier, save_model
from src.modules.classifiers.svm import grid_search_svm
from src.modules.corpus.manifest import load_corpus
from src.modules.corpus.models import Corpus, Group, Utterance
from src.modules.evaluation.folds import majority_vote, make_loso_folds
from src.modules.evaluation.models import (
    Approach,
    AuditFlags,
    AuditReport,
    Condition,
    ConditionResult,
    Fold,
    FoldOutcome,
    LabeledItem,
)
from src.modules.features.extractors import extract, mel_segment_pooled, mel_segments
from src.modules.features.transforms import Pca95, Standardizer
from src.modules.segmentation.models import SegmentSpan
from src.modules.segmentation.snr import SNR_METHODS, GroupSnrStats, estimate_utterance_snr, group_snr_stats
from src.modules.segmentation.vad import detect_segments_with, speaker_durations, split_utterance
from src.utils.logger import ApplicationLogger

logger = ApplicationLogger("AuditRunner")

BIAS_MARGIN = 0.05
SNR_GAP_DB = 3.0
DEFAULT_SEEDS = (17, 42, 1337)


def condition_signal(utt: Utterance, spans: Optional[Sequence[SegmentSpan]], condition: Condition) -> np.ndarray:
    """Samples of one utterance under a condition; combined is the untouched utterance."""
    condition = Condition(condition)
    if condition is Condition.COMBINED:
        return utt.samples
    if spans is None:
        raise MissingConditionError(f"{utt.utterance_id}: no VAD spans for the {condition.value} condition")
    speech, nonspeech = split_utterance(utt, spans)
    return speech if condition is Condition.SPEECH else nonspeech


def build_items(
    corpus: Corpus,
    condition: Condition,
    approach: Approach,
    spans: Optional[Mapping[str, Sequence[SegmentSpan]]] = None,
    cfg: Optional[FeatureConfig] = None,
) -> Tuple[List[LabeledItem], int]:
    """
    Extract the classification items of one (condition, approach) pair.

    Utterances whose condition signal is empty or too short for the
    extractor are skipped with a warning.

    Returns:
        Items in corpus order and the number of skipped utterances

    Raises:
        InsufficientDataError: A speaker is left without any item
    """
    condition, approach = Condition(condition), Approach(approach)
    items: List[LabeledItem] = []
    skipped = 0
    for speaker in corpus.speakers:
        label = speaker.record.group.label
        before = len(items)
        for utt in speaker.utterances:
            signal = condition_signal(utt, None if spans is None else spans.get(utt.utterance_id), condition)
            if signal.shape[0] == 0:
                logger.warning("Skipping utterance with empty condition signal",
                               utterance=utt.utterance_id, condition=condition.value)
                skipped += 1
                continue
            try:
                if approach.segment_level:
                    for segment in mel_segments(signal, utt.utterance_id, cfg):
                        vector = mel_segment_pooled(segment, utt.speaker_id)
                        items.append(LabeledItem(vector.source_id, utt.utterance_id, utt.speaker_id, label, vector.values))
                else:
                    vector = extract(approach.feature_kind, signal, utt.utterance_id, utt.speaker_id, cfg)
                    items.append(LabeledItem(utt.utterance_id, utt.utterance_id, utt.speaker_id, label, vector.values))
            except SignalTooShortError as exc:
                logger.warning("Skipping utterance too short for feature extraction",
                               utterance=utt.utterance_id, condition=condition.value, reason=str(exc))
                skipped += 1
        if len(items) == before:
            raise InsufficientDataError(
                f"speaker {speaker.record.speaker_id} has no usable {condition.value} material for {approach.value}"
            )
    return items, skipped


def _matrix(items_by_id: Mapping[str, LabeledItem], ids: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
    chosen = [items_by_id[i] for i in ids]
    return np.vstack([item.values for item in chosen]), np.array([item.label for item in chosen], dtype=np.int64)


def _signed(labels: np.ndarray) -> np.ndarray:
    return np.where(labels == 1, 1.0, -1.0)


def fit_fold_classifier(
    approach: Approach,
    X_train: np.ndarray,
    y_train: np.ndarray,
    X_val: np.ndarray,
    y_val: np.ndarray,
    seed: int,
    config: AuditConfig,
) -> Tuple[TrainedClassifier, Optional[Dict[str, object]]]:
    """
    Fit preprocessing and classifier on one fold's training data.

    The standardizer (and PCA for the stacked approach) only ever sees
    X_train; validation data is transformed with the fitted states.

    Returns:
        Trained classifier and, for SVM approaches, the grid-search summary
    """
    standardizer = Standardizer().fit(X_train)
    train, val = standardizer.transform(X_train), standardizer.transform(X_val)
    pca_state = None
    if approach.uses_pca:
        pca = Pca95().fit(train)
        train, val = pca.transform(train), pca.transform(val)
        pca_state = pca.state_

    if approach.uses_svm:
        search = grid_search_svm(train, _signed(y_train), val, _signed(y_val), config.grid)
        return TrainedClassifier(search.model, standardizer.state_, pca_state), search.to_dict()

    model = mlp_train(
        train, y_train, seed=seed,
        epochs=config.mlp.epochs, batch=config.mlp.batch_size, lr=config.mlp.learning_rate,
        X_val=val, y_val=y_val, hidden_units=config.mlp.hidden_units,
        patience=config.mlp.scheduler_patience,
    )
    return TrainedClassifier(model, standardizer.state_, pca_state), None


def fold_model_path(model_dir: str, approach: Approach, condition: Condition, seed: int, speaker_id: str) -> str:
    """``<model_dir>/<approach>/<condition>/seed<seed>/<test speaker>.json``"""
    return os.path.join(
        model_dir, Approach(approach).value, Condition(condition).value, f"seed{seed}", f"{speaker_id}.json"
    )


def run_fold(
    items_by_id: Mapping[str, LabeledItem],
    fold: Fold,
    approach: Approach,
    seed: int,
    config: AuditConfig,
    model_path: Optional[str] = None,
) -> FoldOutcome:
    """Train on the fold, predict the held-out speaker's items and vote; optionally keep the model."""
    X_train, y_train = _matrix(items_by_id, fold.train_ids)
    X_val, y_val = _matrix(items_by_id, fold.val_ids)
    X_test, y_test = _matrix(items_by_id, fold.test_ids)

    trained, grid = fit_fold_classifier(approach, X_train, y_train, X_val, y_val, seed, config)
    if model_path:
        os.makedirs(os.path.dirname(model_path), exist_ok=True)
        save_model(trained, model_path)
    predicted = majority_vote(trained.predict(X_test).tolist())
    return FoldOutcome(
        seed=seed,
        test_speaker_id=fold.test_speaker_id,
        true_label=int(y_test[0]),
        predicted_label=predicted,
        n_items=len(fold.test_ids),
        grid=grid,
    )


def run_condition(
    corpus: Corpus,
    condition: Condition,
    approach: Approach,
    seeds: Sequence[int] = DEFAULT_SEEDS,
    spans: Optional[Mapping[str, Sequence[SegmentSpan]]] = None,
    config: Optional[AuditConfig] = None,
    items: Optional[Sequence[LabeledItem]] = None,
    n_jobs: Optional[int] = None,
) -> ConditionResult:
    """
    Speaker-level accuracy of one approach on one condition, per seed.

    Args:
        corpus: Loaded corpus
        condition: speech, nonspeech or combined
        approach: One of the four audit approaches
        seeds: Repetition seeds
        spans: VAD spans per utterance id (required except for combined)
        config: Protocol settings; defaults to AuditConfig()
        items: Pre-extracted items, bypassing feature extraction
        n_jobs: Worker count; AUDIT_THREADS / CPU count when omitted

    Returns:
        ConditionResult with per-seed accuracies and first-seed speaker predictions
    """
    condition, approach = Condition(condition), Approach(approach)
    config = config or AuditConfig(seeds=tuple(seeds))
    skipped = 0
    if items is None:
        items, skipped = build_items(corpus, condition, approach, spans, config.features)

    items_by_id = {item.item_id: item for item in items}
    utterance_of = {item.item_id: item.utterance_id for item in items}
    ids_by_speaker: Dict[str, List[str]] = {}
    for item in items:
        ids_by_speaker.setdefault(item.speaker_id, []).append(item.item_id)

    records = corpus.records()
    units = [
        (seed, fold)
        for seed in seeds
        for fold in make_loso_folds(records, seed, config.val_fraction, ids_by_speaker, utterance_of)
    ]
    workers = ApplicationConfig().worker_count(n_jobs or config.threads)
    logger.workflow_step(
        f"Condition {approach.value}/{condition.value}", "STARTED",
        items=len(items), work_units=len(units), workers=workers,
    )
    started = time.perf_counter()
    outcomes = Parallel(n_jobs=workers, prefer="threads")(
        delayed(run_fold)(
            items_by_id, fold, approach, seed, config,
            fold_model_path(config.model_dir, approach, condition, seed, fold.test_speaker_id)
            if config.model_dir else None,
        )
        for seed, fold in units
    )
    outcomes = sorted(outcomes, key=lambda o: (o.seed, o.test_speaker_id))

    seed_accuracies = {
        seed: float(np.mean([o.correct for o in outcomes if o.seed == seed]))
        for seed in seeds
    }
    first_seed = seeds[0]
    result = ConditionResult(
        condition=condition,
        approach=approach,
        seed_accuracies=seed_accuracies,
        n_speakers=len(records),
        speaker_predictions={o.test_speaker_id: o.predicted_label for o in outcomes if o.seed == first_seed},
        outcomes=outcomes,
        n_skipped=skipped,
    )
    if result.n_unconverged:
        logger.warning("SVM fits stopped at the iteration budget", approach=approach.value,
                       condition=condition.value, fits=result.n_unconverged, max_passes=config.grid.max_passes)
    logger.performance_metric(f"{approach.value}/{condition.value} runtime", time.perf_counter() - started)
    logger.workflow_step(
        f"Condition {approach.value}/{condition.value}", "COMPLETED",
        mean=round(result.mean, 4), std=round(result.std, 4),
    )
    return result


def compare_conditions(results: Sequence[ConditionResult], snr: Mapping[Group, GroupSnrStats]) -> AuditFlags:
    """
    Derive the bias flags.

    environment_bias holds when, for a strict majority of the approaches
    that have both conditions, mean(nonspeech) >= mean(speech) - 0.05.
    snr_gap holds when the group mean SNRs differ by more than 3 dB.

    Raises:
        MissingConditionError: No approach has both speech and nonspeech results
    """
    by_key = {(Approach(r.approach), Condition(r.condition)): r for r in results}
    approaches = sorted({approach for approach, _ in by_key}, key=lambda a: a.value)
    votes = []
    for approach in approaches:
        speech = by_key.get((approach, Condition.SPEECH))
        nonspeech = by_key.get((approach, Condition.NONSPEECH))
        if speech is None or nonspeech is None:
            continue
        votes.append(nonspeech.mean >= speech.mean - BIAS_MARGIN)
    if not votes:
        raise MissingConditionError("no approach has both speech and nonspeech results")

    environment_bias = sum(votes) * 2 > len(votes)
    snr_gap = abs(snr[Group.A].mean_db - snr[Group.B].mean_db) > SNR_GAP_DB
    return AuditFlags(environment_bias=environment_bias, snr_gap=snr_gap)


def segment_corpus(corpus: Corpus, config: AuditConfig) -> Dict[str, List[SegmentSpan]]:
    """VAD spans of every utterance keyed by utterance id."""
    spans = {}
    for utt in corpus.utterances():
        try:
            spans[utt.utterance_id] = detect_segments_with(utt, config.vad)
        except AuditError as exc:
            logger.error("VAD failed", exception=exc, utterance=utt.utterance_id)
            raise
    return spans


def run_audit(config: AuditConfig, corpus: Optional[Corpus] = None) -> AuditReport:
    """
    Run the complete audit: VAD, SNR statistics and every (approach x condition) cell.

    Args:
        config: Audit configuration
        corpus: Already loaded corpus; read from config.manifest when omitted

    Returns:
        AuditReport with flags derived from the percentile SNR statistics
    """
    started = time.perf_counter()
    corpus = corpus if corpus is not None else load_corpus(config.manifest)
    corpus_id = config.corpus_id or config.report_name

    logger.workflow_step("Segmentation", "STARTED", utterances=len(corpus.utterances()))
    spans = segment_corpus(corpus, config)
    durations = speaker_durations(corpus, spans)
    logger.workflow_step("Segmentation", "COMPLETED")

    logger.workflow_step("SNR estimation", "STARTED")
    snr_stats = {}
    for method in SNR_METHODS:
        estimates = {
            utt.utterance_id: estimate_utterance_snr(utt, method, config.snr)
            for utt in corpus.utterances()
        }
        snr_stats[method] = group_snr_stats(corpus, estimates)
    logger.workflow_step("SNR estimation", "COMPLETED")

    results = []
    for approach in config.approaches:
        for condition in config.conditions:
            results.append(run_condition(
                corpus, Condition(condition), Approach(approach),
                seeds=config.seeds, spans=spans, config=config,
            ))

    flags = compare_conditions(results, snr_stats[config.snr.method])
    report = AuditReport(
        corpus_id=corpus_id,
        snr_stats=snr_stats,
        results=results,
        flags=flags,
        config=config.snapshot(),
        durations=durations,
    )
    logger.performance_metric("Audit runtime", time.perf_counter() - started)
    if flags.environment_bias:
        logger.warning("Recording-environment bias detected", **flags.to_dict())
    else:
        logger.success("Audit completed without environment bias", **flags.to_dict())
    return report
