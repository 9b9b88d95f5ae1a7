"""Feature vectors, the labeled corpus, and its CSV persistence.

The 23 feature columns are fixed, in the canonical order used everywhere in
this package (F0 statistics, spectral quartiles and peak, duration, the
amplitude-modulation metrics, harmonicity, the eight formant means, formant
dispersal, Wiener entropy). Files written here are bit-stable: `.` decimal
separator, no grouping, `\\n` line endings, values at 12 significant digits.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import HeaderMismatchError, NonNumericCellError
from .manifest import CallLabel

FEATURE_NAMES = (
    "F0Mean",
    "F0Max",
    "F0Min",
    "F0Range",
    "Q25",
    "Q50",
    "Q75",
    "Fpeak",
    "SoundDuration",
    "AMVar",
    "AMRate",
    "AMExtent",
    "Harmonicity",
    "F1Mean",
    "F2Mean",
    "F3Mean",
    "F4Mean",
    "F5Mean",
    "F6Mean",
    "F7Mean",
    "F8Mean",
    "FormantDispersal",
    "WienerEntropyMean",
)

N_FEATURES = len(FEATURE_NAMES)

_CSV_HEADER = ("source_id",) + FEATURE_NAMES + ("cow_id", "call_type")


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


@dataclass(frozen=True)
class FeatureVector:
    """The 23 features of one call, ordered as FEATURE_NAMES."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} values, got {values.shape}")
        object.__setattr__(self, "values", values)

    def __getitem__(self, name: str) -> float:
        return float(self.values[FEATURE_NAMES.index(name)])

    def as_dict(self) -> dict:
        return {n: float(v) for n, v in zip(FEATURE_NAMES, self.values)}


class LabeledCorpus:
    """Feature matrix with call-type and cow-identity labels.

    Rows keep manifest order. All feature vectors share the canonical
    column order, so the matrix can be fed to the classifiers directly.
    """

    def __init__(self, source_ids, x, cow_ids, call_types,
                 feature_names=FEATURE_NAMES):
        self.source_ids = list(source_ids)
        self.x = np.asarray(x, dtype=np.float64)
        self.cow_ids = list(cow_ids)
        self.call_types = list(call_types)
        self.feature_names = tuple(feature_names)
        n = len(self.source_ids)
        if n == 0:
            raise ValueError("corpus must have at least one row")
        if self.x.shape != (n, len(self.feature_names)):
            raise ValueError(
                f"matrix shape {self.x.shape} does not match "
                f"{n} rows x {len(self.feature_names)} features"
            )
        if len(self.cow_ids) != n or len(self.call_types) != n:
            raise ValueError("label lengths do not match row count")

    @property
    def n(self) -> int:
        return len(self.source_ids)

    @property
    def m(self) -> int:
        return len(self.feature_names)

    def rows(self):
        for i, sid in enumerate(self.source_ids):
            yield sid, FeatureVector(self.x[i]), CallLabel(
                self.cow_ids[i], self.call_types[i]
            )

    def subset(self, mask) -> "LabeledCorpus":
        mask = np.asarray(mask)
        idx = np.flatnonzero(mask) if mask.dtype == bool else mask
        return LabeledCorpus(
            [self.source_ids[i] for i in idx],
            self.x[idx],
            [self.cow_ids[i] for i in idx],
            [self.call_types[i] for i in idx],
            self.feature_names,
        )

    def drop_feature(self, index: int) -> "LabeledCorpus":
        keep = [j for j in range(self.m) if j != index]
        return LabeledCorpus(
            self.source_ids,
            self.x[:, keep],
            self.cow_ids,
            self.call_types,
            tuple(self.feature_names[j] for j in keep),
        )


def write_features_csv(corpus: LabeledCorpus, path) -> None:
    """Persist a corpus; see module docstring for the stability guarantees."""
    if corpus.feature_names != FEATURE_NAMES:
        raise ValueError("only full 23-feature corpora are persisted")
    with open(os.fspath(path), "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CSV_HEADER)
        for i, sid in enumerate(corpus.source_ids):
            row = [sid] + [_fmt(v) for v in corpus.x[i]]
            row += [corpus.cow_ids[i], corpus.call_types[i]]
            writer.writerow(row)


def read_features_csv(path) -> LabeledCorpus:
    """Read a features CSV written by write_features_csv.

    The header must match the canonical column order exactly; every feature
    cell must be a finite number (missing values are not representable).
    """
    path = os.fspath(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderMismatchError(f"{path}: empty file") from None
        if tuple(header) != _CSV_HEADER:
            raise HeaderMismatchError(
                f"{path}: header does not match the canonical "
                f"{len(_CSV_HEADER)}-column layout"
            )
        source_ids, rows, cow_ids, call_types = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(_CSV_HEADER):
                raise HeaderMismatchError(
                    f"{path}:{lineno}: expected {len(_CSV_HEADER)} columns"
                )
            values = []
            for name, cell in zip(FEATURE_NAMES, row[1:1 + N_FEATURES]):
                try:
                    v = float(cell)
                except ValueError:
                    raise NonNumericCellError(
                        f"{path}:{lineno}: {name}={cell!r}"
                    ) from None
                if not math.isfinite(v):
                    raise NonNumericCellError(f"{path}:{lineno}: {name}={cell!r}")
                values.append(v)
            source_ids.append(row[0])
            rows.append(values)
            cow_ids.append(row[1 + N_FEATURES])
            call_types.append(row[2 + N_FEATURES])
    if not source_ids:
        raise HeaderMismatchError(f"{path}: no data rows")
    # validate call_type tokens
    for cid, ct in zip(cow_ids, call_types):
        CallLabel(cid, ct)
    return LabeledCorpus(source_ids, np.array(rows), cow_ids, call_types)
