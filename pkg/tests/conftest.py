"""Shared fixtures.

Heavy fixtures (trained models, cross-validation reports, ablation runs) are
session-scoped so the acceptance tests can reuse them instead of retraining.

Dataset-dependent tests need the released recordings; point CATTLEVOC_DATASET
at either a manifest CSV (audio paths resolved relative to it) or an already
extracted features CSV. Without the variable those tests skip.
"""

import os

import numpy as np
import pytest

from cattlevoc import read_features_csv
from cattlevoc.errors import HeaderMismatchError
from cattlevoc.features import extract_corpus
from cattlevoc.importance import lofo_importance
from cattlevoc.manifest import load_manifest
from cattlevoc.pipeline import CVConfig, TaskSpec, cross_validate, train_ensemble
from cattlevoc.synth import blobs_corpus

DATASET_ENV = "CATTLEVOC_DATASET"


def pytest_configure(config):
    config.addinivalue_line("markers", "dataset: needs the released call recordings")


@pytest.fixture(scope="session")
def dataset_corpus():
    path = os.environ.get(DATASET_ENV)
    if not path:
        pytest.skip(f"set {DATASET_ENV} to a manifest or features CSV to run this")
    try:
        return read_features_csv(path)
    except HeaderMismatchError:
        entries = load_manifest(path, audio_root=os.path.dirname(os.path.abspath(path)))
        return extract_corpus(entries).corpus


@pytest.fixture(scope="session")
def blobs120():
    """Three well-separated classes, 40 calls each."""
    return blobs_corpus(3, 40, seed=7)


@pytest.fixture(scope="session")
def blobs_cv_report(blobs120):
    return cross_validate(blobs120, TaskSpec(target="cowid"), CVConfig(k=3, r=2, seed=11))


@pytest.fixture(scope="session")
def shuffled_labels_cv(blobs120):
    """Cross-validation after severing the label-feature link."""
    from cattlevoc.corpus import LabeledCorpus

    rng = np.random.default_rng(21)
    shuffled = list(rng.permutation(blobs120.call_types))
    corpus = LabeledCorpus(
        blobs120.source_ids, blobs120.x, blobs120.cow_ids, shuffled, blobs120.feature_names
    )
    report = cross_validate(corpus, TaskSpec(target="calltype"), CVConfig(k=3, r=2, seed=17))
    majority = max(shuffled.count("HF"), shuffled.count("LF")) / len(shuffled)
    return report, majority


@pytest.fixture(scope="session")
def small_ensemble(blobs120):
    """An r=3 ensemble over the blobs corpus, for serialization and voting tests."""
    return train_ensemble(
        blobs120.x,
        blobs120.cow_ids,
        sorted(set(blobs120.cow_ids)),
        blobs120.feature_names,
        r=3,
        seed=5,
    )


@pytest.fixture(scope="session")
def planted_corpus():
    """Labels depend on exactly one feature column; the rest is seeded noise."""
    rng = np.random.default_rng(42)
    n = 120
    x = rng.normal(size=(n, 23))
    y = rng.integers(0, 2, size=n)
    planted = 10  # AMRate's column
    x[:, planted] = y * 8.0 + rng.normal(scale=0.3, size=n)
    from cattlevoc.corpus import FEATURE_NAMES, LabeledCorpus

    return LabeledCorpus(
        [f"p{i:03d}" for i in range(n)],
        x,
        [f"cow{v}" for v in y],
        ["HF" if v else "LF" for v in y],
        feature_names=FEATURE_NAMES,
    ), FEATURE_NAMES[planted]


@pytest.fixture(scope="session")
def planted_importance(planted_corpus):
    corpus, planted_name = planted_corpus
    report = lofo_importance(corpus, TaskSpec(target="calltype"), CVConfig(k=2, r=1, seed=3))
    return report, planted_name
