"""
Leave-One-Speaker-Out Folds

Every speaker is held out once; the remaining speakers' utterances are shuffled
by the seed and split into a pooled, group-stratified 90/10 train /
validation partition.

Author: Corpus Audit Team
Date: October 18, 2026
"""

from collections import Counter
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
from sklearn.model_selection import LeaveOneGroupOut, train_test_split

from src.core.exceptions import InsufficientDataError, MissingGroupError
from src.modules.corpus.manifest import utterance_id_for
from src.modules.corpus.models import Group, SpeakerRecord
from src.modules.evaluation.models import Fold
from src.utils.logger import ApplicationLogger

logger = ApplicationLogger("FoldBuilder")

MIN_SPEAKERS = 3


def _split_pool(ids: List[str], labels: List[int], val_fraction: float, seed: int):
    try:
        return train_test_split(ids, test_size=val_fraction, stratify=labels, random_state=seed, shuffle=True)
    except ValueError:
        # a class too small to appear on both sides
        logger.warning("Stratified split impossible, using a plain shuffled split",
                       n_items=len(ids), seed=seed)
        return train_test_split(ids, test_size=val_fraction, random_state=seed, shuffle=True)


def _split_by_utterance(pool: List[str], pool_labels: List[int], utterance_of: Mapping[str, str],
                        val_fraction: float, seed: int):
    """Split the pool's utterances, then expand each side back to its items in pool order."""
    utterances: List[str] = []
    labels: List[int] = []
    seen = set()
    for item, label in zip(pool, pool_labels):
        utterance = utterance_of.get(item, item)
        if utterance not in seen:
            seen.add(utterance)
            utterances.append(utterance)
            labels.append(label)
    _, val_utterances = _split_pool(utterances, labels, val_fraction, seed)
    held = set(val_utterances)
    train_ids = [item for item in pool if utterance_of.get(item, item) not in held]
    val_ids = [item for item in pool if utterance_of.get(item, item) in held]
    return train_ids, val_ids


def make_loso_folds(
    speakers: Sequence[SpeakerRecord],
    seed: int,
    val_fraction: float = 0.1,
    items: Optional[Mapping[str, Sequence[str]]] = None,
    utterance_of: Optional[Mapping[str, str]] = None,
) -> List[Fold]:
    """
    Build one fold per speaker.

    The validation split draws whole utterances: segment items of one
    utterance always land on the same side.

    Args:
        speakers: Manifest records; both groups must be present
        seed: Shuffling seed of the train / validation split
        val_fraction: Share of the training pool's utterances held out for validation
        items: Item ids per speaker id; defaults to the speakers' utterance ids
        utterance_of: Source utterance per item id; items missing here are their own utterance

    Returns:
        Folds ordered by test speaker id

    Raises:
        InsufficientDataError: Fewer than 3 speakers
        MissingGroupError: Only one group present
    """
    if len(speakers) < MIN_SPEAKERS:
        raise InsufficientDataError(f"leave-one-speaker-out needs at least {MIN_SPEAKERS} speakers, got {len(speakers)}")
    present = {record.group for record in speakers}
    if present != set(Group):
        raise MissingGroupError("both groups must be present to build folds")

    if items is None:
        items = {
            record.speaker_id: [utterance_id_for(record.speaker_id, path) for path in record.utterance_paths]
            for record in speakers
        }
    label_of: Dict[str, int] = {record.speaker_id: record.group.label for record in speakers}

    item_ids: List[str] = []
    owners: List[str] = []
    for record in speakers:
        speaker_items = list(items.get(record.speaker_id, ()))
        if not speaker_items:
            raise InsufficientDataError(f"speaker {record.speaker_id} has no usable items")
        item_ids.extend(speaker_items)
        owners.extend([record.speaker_id] * len(speaker_items))

    ids = np.asarray(item_ids, dtype=object)
    groups = np.asarray(owners, dtype=object)
    folds = []
    for train_index, test_index in LeaveOneGroupOut().split(ids, groups=groups):
        test_speaker = str(groups[test_index[0]])
        pool = [str(i) for i in ids[train_index]]
        pool_labels = [label_of[str(owner)] for owner in groups[train_index]]
        train_ids, val_ids = _split_by_utterance(pool, pool_labels, utterance_of or {}, val_fraction, seed)
        folds.append(Fold(
            test_speaker_id=test_speaker,
            train_ids=tuple(train_ids),
            val_ids=tuple(val_ids),
            test_ids=tuple(str(i) for i in ids[test_index]),
        ))
    return folds


def majority_vote(predictions: Sequence[int]) -> int:
    """
    Most frequent label in {0, 1}; an exact tie goes to class 1.

    Raises:
        InsufficientDataError: No predictions
    """
    if len(predictions) == 0:
        raise InsufficientDataError("majority vote over an empty prediction list")
    counts = Counter(int(p) for p in predictions)
    return 1 if counts[1] >= counts[0] else 0
