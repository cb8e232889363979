"""
Manifest and Corpus Loading

Parses the tab-separated corpus manifest, reads utterances into memory and
handles the ground-truth sidecar written by the synthetic generator.

Manifest grammar: one ``speaker_id<TAB>group<TAB>relative/path.wav`` record
per line, group in {A, B}, ``#`` lines ignored. A speaker's lines form one
contiguous block.

Author: Corpus Audit Team
Date: October 18, 2026
"""

import json
import os
from collections import OrderedDict
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.core.exceptions import (
    DuplicateSpeakerError,
    EmptyManifestError,
    ManifestError,
    ManifestNotFoundError,
    MissingGroupError,
    UnknownGroupError,
)
from src.core.wav_io import read_wav_samples, write_wav_samples
from src.modules.corpus.models import (
    Corpus,
    GroundTruth,
    Group,
    SpeakerRecord,
    SpeakerUtterances,
    Utterance,
)
from src.utils.logger import ApplicationLogger

logger = ApplicationLogger("CorpusLoader")


def parse_manifest(text: str, base_dir: str = "") -> List[SpeakerRecord]:
    """
    Parse manifest text into speaker records.

    Args:
        text: Manifest content
        base_dir: Directory relative paths are resolved against

    Returns:
        Speaker records in order of first appearance

    Raises:
        DuplicateSpeakerError: A speaker's block is repeated or its group changes
        UnknownGroupError: A group token other than A or B
        EmptyManifestError: No records
        MissingGroupError: Only one group present
    """
    blocks: "OrderedDict[str, Dict[str, object]]" = OrderedDict()
    current = None

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3 or not all(f.strip() for f in fields):
            raise ManifestError(f"line {line_number}: expected 'speaker_id<TAB>group<TAB>path'")
        speaker_id, token, rel_path = (f.strip() for f in fields)

        try:
            group = Group(token)
        except ValueError:
            raise UnknownGroupError(f"line {line_number}: unknown group '{token}'") from None

        if speaker_id != current:
            if speaker_id in blocks:
                raise DuplicateSpeakerError(f"line {line_number}: speaker '{speaker_id}' listed in more than one block")
            blocks[speaker_id] = {"group": group, "paths": []}
            current = speaker_id
        elif blocks[speaker_id]["group"] is not group:
            raise DuplicateSpeakerError(f"line {line_number}: speaker '{speaker_id}' listed under two groups")

        blocks[speaker_id]["paths"].append(os.path.normpath(os.path.join(base_dir, rel_path)))

    if not blocks:
        raise EmptyManifestError("manifest contains no records")

    records = [
        SpeakerRecord(speaker_id=sid, group=block["group"], utterance_paths=tuple(block["paths"]))
        for sid, block in blocks.items()
    ]
    present = {record.group for record in records}
    missing = [g.value for g in Group if g not in present]
    if missing:
        raise MissingGroupError(f"manifest has no speakers in group(s) {', '.join(missing)}")
    return records


def load_manifest(path: str) -> List[SpeakerRecord]:
    """Load a manifest file; paths are resolved relative to its directory."""
    if not os.path.isfile(path):
        raise ManifestNotFoundError(f"manifest not found: {path}")
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return parse_manifest(text, base_dir=os.path.dirname(os.path.abspath(path)))


def utterance_id_for(speaker_id: str, path: str) -> str:
    stem = os.path.splitext(os.path.basename(path))[0]
    return f"{speaker_id}/{stem}"


def read_wav(path: str, speaker_id: str = "", utterance_id: str = "", group: Optional[Group] = None) -> Utterance:
    """
    Read a 16 kHz PCM16 mono WAV file into an Utterance.

    Raises:
        SampleRateError, ChannelCountError, BitDepthError, TruncatedWavError
    """
    samples = read_wav_samples(path)
    return Utterance(
        utterance_id=utterance_id or utterance_id_for(speaker_id, path),
        speaker_id=speaker_id,
        samples=samples,
        group=group,
    )


def write_wav(path: str, samples: np.ndarray) -> None:
    """Inverse of read_wav: PCM16 mono 16 kHz with rounding and clipping."""
    write_wav_samples(path, samples)


def load_corpus(manifest_path: str) -> Corpus:
    """
    Load every utterance referenced by a manifest.

    Returns:
        Corpus with speakers in manifest order
    """
    logger.workflow_step("Corpus loading", "STARTED", manifest=manifest_path)
    records = load_manifest(manifest_path)
    speakers = []
    for record in records:
        utterances = []
        for path in record.utterance_paths:
            try:
                utterances.append(read_wav(path, speaker_id=record.speaker_id, group=record.group))
            except Exception as exc:
                logger.error("Failed to read utterance", exception=exc, speaker=record.speaker_id, path=path)
                raise
        speakers.append(SpeakerUtterances(record=record, utterances=utterances))
    corpus = Corpus(speakers=speakers, source=manifest_path)
    logger.workflow_step(
        "Corpus loading", "COMPLETED",
        speakers=len(speakers), utterances=len(corpus.utterances()),
    )
    return corpus


def write_sidecar(records: Sequence[GroundTruth], path: str) -> None:
    payload = [record.to_dict() for record in records]
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_sidecar(path: str) -> List[GroundTruth]:
    """Read the generator's ground-truth sidecar."""
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    if not isinstance(payload, list):
        raise ManifestError(f"{path}: sidecar must be a JSON array")
    return [
        GroundTruth(
            utterance_id=item["utterance_id"],
            speaker_id=item["speaker_id"],
            group=Group(item["group"]),
            true_snr_db=float(item["true_snr_db"]),
            speech_start_s=float(item["speech_start_s"]),
            speech_end_s=float(item["speech_end_s"]),
            f0_hz=float(item.get("f0_hz", 0.0)),
        )
        for item in payload
    ]
