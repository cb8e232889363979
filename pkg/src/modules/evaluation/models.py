"""
Evaluation Data Models

Folds, per-condition results, bias flags and the audit report.

Author: Corpus Audit Team
Date: October 18, 2026
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.modules.corpus.models import Group
from src.modules.features.extractors import FeatureKind
from src.modules.segmentation.models import SpeakerDuration
from src.modules.segmentation.snr import GroupSnrStats


class Condition(str, Enum):
    SPEECH = "speech"
    NONSPEECH = "nonspeech"
    COMBINED = "combined"


class Approach(str, Enum):
    """Feature / classifier pairing evaluated by the audit."""
    SVM_MFCC = "svm_mfcc"
    SVM_SPARSITY = "svm_sparsity"
    SVM_PCA_STACK = "svm_pca_stack"
    MLP_MEL = "mlp_mel"

    @property
    def feature_kind(self) -> FeatureKind:
        return {
            Approach.SVM_MFCC: FeatureKind.MFCC_STATS,
            Approach.SVM_SPARSITY: FeatureKind.SPARSITY,
            Approach.SVM_PCA_STACK: FeatureKind.STACK,
            Approach.MLP_MEL: FeatureKind.MEL_POOLED,
        }[self]

    @property
    def uses_svm(self) -> bool:
        return self is not Approach.MLP_MEL

    @property
    def uses_pca(self) -> bool:
        return self is Approach.SVM_PCA_STACK

    @property
    def segment_level(self) -> bool:
        """Items are 500 ms segments rather than whole signals."""
        return self is Approach.MLP_MEL


@dataclass(frozen=True, eq=False)
class LabeledItem:
    """One classification item (utterance or segment) with its features."""
    item_id: str
    utterance_id: str
    speaker_id: str
    label: int
    values: np.ndarray


@dataclass(frozen=True)
class Fold:
    """Leave-one-speaker-out fold over item ids."""
    test_speaker_id: str
    train_ids: Tuple[str, ...]
    val_ids: Tuple[str, ...]
    test_ids: Tuple[str, ...] = ()


@dataclass(frozen=True)
class FoldOutcome:
    """Speaker-level decision of one (seed, fold) work unit."""
    seed: int
    test_speaker_id: str
    true_label: int
    predicted_label: int
    n_items: int
    grid: Optional[Dict[str, Any]] = None

    @property
    def correct(self) -> bool:
        return self.true_label == self.predicted_label


@dataclass
class ConditionResult:
    """Speaker accuracies of one approach on one condition, per seed."""
    condition: Condition
    approach: Approach
    seed_accuracies: Dict[int, float]
    n_speakers: int = 0
    speaker_predictions: Dict[str, int] = field(default_factory=dict)
    outcomes: List[FoldOutcome] = field(default_factory=list)
    n_skipped: int = 0

    @property
    def accuracies(self) -> List[float]:
        return [self.seed_accuracies[seed] for seed in sorted(self.seed_accuracies)]

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        # population deviation over the seeds
        return float(np.std(self.accuracies))

    @property
    def n_unconverged(self) -> int:
        """SVM fits across all folds and grid cells that hit the SMO iteration budget."""
        return sum(
            1 for o in self.outcomes if o.grid is not None
            for cell in o.grid["cells"] if not cell.get("converged", True)
        )

    def to_dict(self) -> Dict[str, Any]:
        grids = [
            {"seed": o.seed, "test_speaker_id": o.test_speaker_id, **o.grid}
            for o in self.outcomes
            if o.grid is not None
        ]
        return {
            "approach": self.approach.value,
            "condition": self.condition.value,
            "seed_accuracies": {str(seed): self.seed_accuracies[seed] for seed in sorted(self.seed_accuracies)},
            "mean": self.mean,
            "std": self.std,
            "n_speakers": self.n_speakers,
            "n_skipped_utterances": self.n_skipped,
            "n_unconverged_fits": self.n_unconverged,
            "speaker_predictions": dict(sorted(self.speaker_predictions.items())),
            "grid_search": grids,
        }


@dataclass(frozen=True)
class AuditFlags:
    environment_bias: bool
    snr_gap: bool

    def to_dict(self) -> Dict[str, bool]:
        return {"environment_bias": self.environment_bias, "snr_gap": self.snr_gap}


@dataclass
class AuditReport:
    """Everything a finished audit produces; serialized by render_report."""
    corpus_id: str
    snr_stats: Dict[str, Dict[Group, GroupSnrStats]]
    results: List[ConditionResult]
    flags: AuditFlags
    config: Dict[str, Any] = field(default_factory=dict)
    durations: List[SpeakerDuration] = field(default_factory=list)

    def result_for(self, approach: Approach, condition: Condition) -> Optional[ConditionResult]:
        for result in self.results:
            if result.approach is approach and result.condition is condition:
                return result
        return None

    def approaches(self) -> List[Approach]:
        seen: List[Approach] = []
        for result in self.results:
            if result.approach not in seen:
                seen.append(result.approach)
        return seen

    def to_dict(self) -> Dict[str, Any]:
        return {
            "corpus_id": self.corpus_id,
            "flags": self.flags.to_dict(),
            "snr": {
                method: {
                    group.value: {"mean_db": s.mean_db, "std_db": s.std_db, "n_utterances": s.n_utterances}
                    for group, s in sorted(stats.items(), key=lambda item: item[0].value)
                }
                for method, stats in sorted(self.snr_stats.items())
            },
            "durations": [
                {"speaker_id": d.speaker_id, "speech_s": d.speech_s, "nonspeech_s": d.nonspeech_s}
                for d in self.durations
            ],
            "results": [
                r.to_dict()
                for r in sorted(self.results, key=lambda r: (r.approach.value, r.condition.value))
            ],
            "config": self.config,
        }
