"""Acoustic feature extraction and explainable classification for cattle calls."""

from .audio import AudioClip, read_wav, write_wav
from .corpus import (
    FEATURE_NAMES,
    N_FEATURES,
    FeatureVector,
    LabeledCorpus,
    read_features_csv,
    write_features_csv,
)
from .features import (
    AnalysisConfig,
    CallFeatures,
    am_metrics,
    extract_corpus,
    extract_features,
)
from .importance import (
    ImportanceReport,
    lofo_importance,
    render_importance_chart,
    write_importance_csv,
)
from .manifest import CALL_TYPES, CallLabel, ManifestEntry, load_manifest

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "AudioClip",
    "CALL_TYPES",
    "CallFeatures",
    "CallLabel",
    "FEATURE_NAMES",
    "FeatureVector",
    "ImportanceReport",
    "LabeledCorpus",
    "ManifestEntry",
    "N_FEATURES",
    "am_metrics",
    "extract_corpus",
    "extract_features",
    "load_manifest",
    "lofo_importance",
    "read_features_csv",
    "read_wav",
    "render_importance_chart",
    "write_features_csv",
    "write_importance_csv",
    "write_wav",
    "__version__",
]
