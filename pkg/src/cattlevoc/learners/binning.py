"""Quantile binning shared by the tree learners.

Both tree learners split on binned feature values. A split at bin b sends
codes <= b left, which on raw values is exactly `x < edges[b]`; trees store
that edge so fitted models predict straight from unbinned inputs.
"""

import numpy as np

MAX_BINS = 64


def bin_edges(col: np.ndarray, max_bins: int = MAX_BINS) -> np.ndarray:
    """Ascending cut points (at most max_bins - 1) from column quantiles."""
    qs = np.arange(1, max_bins) / max_bins
    return np.unique(np.quantile(col, qs, method="linear"))


def bin_codes(x: np.ndarray, edges: list) -> np.ndarray:
    """Map raw columns to uint8 codes; code = number of edges <= value."""
    codes = np.empty(x.shape, dtype=np.uint8)
    for j, e in enumerate(edges):
        codes[:, j] = np.searchsorted(e, x[:, j], side="right")
    return codes
