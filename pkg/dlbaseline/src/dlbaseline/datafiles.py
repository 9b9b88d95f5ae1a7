"""Readers for the files the feature pipeline publishes.

The handoff is two CSVs: the label manifest (file,cow_id,call_type) that
points at the WAV recordings, and a fold-assignment file
(source_id,cow_id,call_type,fold) written by the pipeline's evaluation so
both models score the exact same splits.
"""

import csv
import os
from dataclasses import dataclass

from .errors import DataFileError

CALL_TYPES = ("HF", "LF")


@dataclass(frozen=True)
class FoldRow:
    source_id: str
    cow_id: str
    call_type: str
    fold: int


def read_fold_file(path: str) -> list[FoldRow]:
    if not os.path.isfile(path):
        raise DataFileError(f"fold file not found: {path}")
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["source_id", "cow_id", "call_type", "fold"]:
            raise DataFileError(f"{path}: unexpected header {header}")
        for line, rec in enumerate(reader, start=2):
            if len(rec) != 4:
                raise DataFileError(f"{path}:{line}: expected 4 columns")
            sid, cow, ct, fold = rec
            if ct not in CALL_TYPES:
                raise DataFileError(f"{path}:{line}: bad call type {ct!r}")
            try:
                fold_idx = int(fold)
            except ValueError as exc:
                raise DataFileError(f"{path}:{line}: bad fold {fold!r}") from exc
            rows.append(FoldRow(sid, cow, ct, fold_idx))
    if not rows:
        raise DataFileError(f"{path}: no assignments")
    folds = sorted({r.fold for r in rows})
    if folds != list(range(len(folds))) or len(folds) < 2:
        raise DataFileError(f"{path}: fold indices must cover 0..k-1 with k >= 2")
    return rows


def read_wav_paths(manifest_path: str, audio_root: str | None = None) -> dict:
    """Map source id (file stem) to WAV path from a label manifest."""
    if not os.path.isfile(manifest_path):
        raise DataFileError(f"manifest not found: {manifest_path}")
    root = audio_root if audio_root is not None else os.path.dirname(manifest_path)
    paths = {}
    with open(manifest_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[0] != "file":
            raise DataFileError(f"{manifest_path}: expected a file,cow_id,call_type header")
        for line, rec in enumerate(reader, start=2):
            if not rec:
                continue
            rel = rec[0]
            sid = os.path.splitext(os.path.basename(rel))[0]
            if sid in paths:
                raise DataFileError(f"{manifest_path}:{line}: duplicate source id {sid!r}")
            paths[sid] = rel if os.path.isabs(rel) else os.path.join(root, rel)
    if not paths:
        raise DataFileError(f"{manifest_path}: no entries")
    return paths


def labels_for(rows: list, target: str) -> tuple[list, tuple]:
    """Per-row labels and the class tuple for a prediction target."""
    if target == "calltype":
        return [r.call_type for r in rows], CALL_TYPES
    if target == "cowid":
        labels = [r.cow_id for r in rows]
        return labels, tuple(sorted(set(labels)))
    raise ValueError(f"unknown target {target!r}")
