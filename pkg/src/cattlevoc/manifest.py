"""Label manifest: binds WAV files to cow identity and call type."""
from __future__ import annotations

import csv
import os
from collections import Counter
from dataclasses import dataclass

from .errors import BadTokenError, EmptyManifestError, MissingFileError

MANIFEST_HEADER = ["file", "cow_id", "call_type"]

CALL_TYPES = ("HF", "LF")


@dataclass(frozen=True)
class CallLabel:
    cow_id: str
    call_type: str  # "HF" or "LF"

    def __post_init__(self):
        if self.call_type not in CALL_TYPES:
            raise BadTokenError(f"call_type must be HF or LF, got {self.call_type!r}")


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: CallLabel

    @property
    def source_id(self) -> str:
        return os.path.splitext(os.path.basename(self.path))[0]


def load_manifest(path, audio_root=None, require_files=True) -> list[ManifestEntry]:
    """Read a `file,cow_id,call_type` CSV and resolve audio paths.

    Relative file names are resolved against audio_root (default: the
    manifest's directory). Row order is preserved. call_type is folded to
    upper case, so "hf" is accepted as HF. With require_files=False a
    missing WAV is kept in the listing and surfaces later when the file is
    actually opened, letting batch extraction skip it as a per-row failure.
    """
    path = os.fspath(path)
    if audio_root is None:
        audio_root = os.path.dirname(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyManifestError(f"{path}: empty file") from None
        if [h.strip() for h in header] != MANIFEST_HEADER:
            raise BadTokenError(
                f"{path}: header must be {','.join(MANIFEST_HEADER)}"
            )
        entries = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise BadTokenError(f"{path}:{lineno}: expected 3 columns")
            fname, cow_id, call_type = (c.strip() for c in row)
            token = call_type.upper()
            if token not in CALL_TYPES:
                raise BadTokenError(
                    f"{path}:{lineno}: call_type {call_type!r} is not HF or LF"
                )
            wav_path = fname if os.path.isabs(fname) else os.path.join(audio_root, fname)
            if require_files and not os.path.isfile(wav_path):
                raise MissingFileError(f"{path}:{lineno}: {wav_path} not found")
            entries.append(ManifestEntry(path=wav_path, label=CallLabel(cow_id, token)))
    if not entries:
        raise EmptyManifestError(f"{path}: header only, no rows")
    return entries


def manifest_summary(entries: list[ManifestEntry]) -> dict:
    """Counts useful for sanity-checking a loaded manifest."""
    type_counts = Counter(e.label.call_type for e in entries)
    cows = sorted({e.label.cow_id for e in entries})
    return {
        "n": len(entries),
        "n_hf": type_counts.get("HF", 0),
        "n_lf": type_counts.get("LF", 0),
        "cows": cows,
    }
