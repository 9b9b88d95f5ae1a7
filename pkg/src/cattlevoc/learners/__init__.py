"""Deterministic base learners over binned or standardized features."""

from .binning import bin_codes, bin_edges
from .forest import RandomForest
from .gbdt import GradientBoostedTrees
from .linear import LogisticRegression

__all__ = [
    "GradientBoostedTrees",
    "LogisticRegression",
    "RandomForest",
    "bin_codes",
    "bin_edges",
]
