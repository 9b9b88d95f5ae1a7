"""Accuracy, macro F1, confusion counts, and the fold-selection score."""

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyMetricsError


@dataclass(frozen=True)
class FoldMetrics:
    index: int
    accuracy: float
    f1: float


def accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    y_true = np.asarray(y_true)
    if len(y_true) == 0:
        raise ValueError("empty evaluation set")
    return float(np.mean(y_true == np.asarray(y_pred)))


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray, n_classes: int) -> np.ndarray:
    """Counts with true classes on rows, predicted on columns."""
    out = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(np.asarray(y_true), np.asarray(y_pred)):
        out[t, p] += 1
    return out


def macro_f1(conf: np.ndarray) -> float:
    """Unweighted mean of per-class F1; a class with no true or predicted
    members scores 0."""
    conf = np.asarray(conf, dtype=np.float64)
    tp = np.diag(conf)
    fp = conf.sum(axis=0) - tp
    fn = conf.sum(axis=1) - tp
    denom = 2 * tp + fp + fn
    f1 = np.where(denom > 0, 2 * tp / np.where(denom > 0, denom, 1.0), 0.0)
    return float(np.mean(f1))


def selection_loss(fold_metrics) -> float:
    """Mean of (accuracy + f1) / 2 over folds; higher is better."""
    fold_metrics = list(fold_metrics)
    if not fold_metrics:
        raise EmptyMetricsError("no fold metrics to score")
    k = len(fold_metrics)
    return float(sum(fm.accuracy + fm.f1 for fm in fold_metrics) / (2 * k))
