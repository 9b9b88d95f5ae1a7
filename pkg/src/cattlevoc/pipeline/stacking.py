"""One bag's model: three heterogeneous base learners under a tuned meta-learner.

Meta features are the base learners' class probabilities, produced
out-of-fold inside the bag so the meta-learner never sees a probability
from a model that trained on that row. The meta-learner is a gradient
booster whose depth, learning rate, and tree count come from an exhaustive
grid scored on those same internal folds.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateBagError
from ..learners import GradientBoostedTrees, LogisticRegression, RandomForest
from .folds import DOMAIN_INTERNAL, derive_rng, round_robin_folds
from .metrics import FoldMetrics, accuracy, confusion_matrix, macro_f1, selection_loss

META_GRID_DEPTHS = (2, 3, 4)
META_GRID_RATES = (0.05, 0.1, 0.3)
META_GRID_TREES = (50, 150, 300)
INTERNAL_FOLDS = 5

# Base-learner settings (the meta grid above is fixed; these are not tuned).
BASE_GBDT_ROUNDS = 200
BASE_GBDT_DEPTH = 3
BASE_GBDT_RATE = 0.1
BASE_FOREST_TREES = 100


def train_base_learners(x: np.ndarray, y: np.ndarray, n_classes: int, seed: int):
    """Fit the fixed portfolio: boosted trees, random forest, logistic."""
    y = np.asarray(y, dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise DegenerateBagError("bag holds a single class")
    gbdt = GradientBoostedTrees(
        n_rounds=BASE_GBDT_ROUNDS, depth=BASE_GBDT_DEPTH, learning_rate=BASE_GBDT_RATE
    ).fit(x, y, n_classes)
    forest = RandomForest(n_trees=BASE_FOREST_TREES, seed=seed).fit(x, y, n_classes)
    logreg = LogisticRegression().fit(x, y, n_classes)
    return gbdt, forest, logreg


@dataclass(frozen=True)
class StackedModel:
    base_learners: tuple
    meta: GradientBoostedTrees
    meta_depth: int
    meta_rate: float
    meta_trees: int
    # selection_loss of each candidate and of each base learner on the
    # internal folds, for inspection
    grid_scores: dict
    base_scores: dict

    def meta_features(self, x: np.ndarray) -> np.ndarray:
        return np.hstack([learner.predict_proba(x) for learner in self.base_learners])

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return self.meta.predict_proba(self.meta_features(x), n_rounds=self.meta_trees)


def _internal_oof(x, y, n_classes, folds, seed):
    """Out-of-fold base probabilities plus per-fold, per-learner metrics."""
    n = len(y)
    oof = np.zeros((n, 3 * n_classes))
    base_fold_metrics = ([], [], [])
    for j in sorted(set(folds)):
        val = folds == j
        if not val.any() or val.all():
            continue
        learners = train_base_learners(x[~val], y[~val], n_classes, seed)
        for li, learner in enumerate(learners):
            proba = learner.predict_proba(x[val])
            oof[val, li * n_classes : (li + 1) * n_classes] = proba
            pred = proba.argmax(axis=1)
            base_fold_metrics[li].append(
                FoldMetrics(
                    index=int(j),
                    accuracy=accuracy(y[val], pred),
                    f1=macro_f1(confusion_matrix(y[val], pred, n_classes)),
                )
            )
    return oof, base_fold_metrics


def train_stacked(x: np.ndarray, y: np.ndarray, n_classes: int, seed: int) -> StackedModel:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    base = train_base_learners(x, y, n_classes, seed)

    k_int = min(INTERNAL_FOLDS, len(y))
    folds = round_robin_folds(y, k_int, derive_rng(seed, DOMAIN_INTERNAL))
    oof, base_fold_metrics = _internal_oof(x, y, n_classes, folds, seed)

    # Exhaustive grid. A single long fit per (depth, rate) covers every tree
    # count exactly, because boosting is prefix-deterministic.
    max_trees = max(META_GRID_TREES)
    grid_fold_metrics = {
        (d, lr, t): []
        for d in META_GRID_DEPTHS
        for lr in META_GRID_RATES
        for t in META_GRID_TREES
    }
    for j in sorted(set(folds)):
        val = folds == j
        if not val.any() or val.all():
            continue
        for d in META_GRID_DEPTHS:
            for lr in META_GRID_RATES:
                fit = GradientBoostedTrees(n_rounds=max_trees, depth=d, learning_rate=lr).fit(
                    oof[~val], y[~val], n_classes
                )
                for t in META_GRID_TREES:
                    pred = fit.predict_proba(oof[val], n_rounds=t).argmax(axis=1)
                    grid_fold_metrics[(d, lr, t)].append(
                        FoldMetrics(
                            index=int(j),
                            accuracy=accuracy(y[val], pred),
                            f1=macro_f1(confusion_matrix(y[val], pred, n_classes)),
                        )
                    )

    grid_scores = {cfg: selection_loss(fms) for cfg, fms in grid_fold_metrics.items()}
    best = max(grid_scores, key=lambda cfg: (grid_scores[cfg], [-v for v in cfg]))
    base_scores = {
        name: selection_loss(fms) if fms else float("nan")
        for name, fms in zip(("gbdt", "forest", "logreg"), base_fold_metrics)
    }

    meta = GradientBoostedTrees(n_rounds=best[2], depth=best[0], learning_rate=best[1]).fit(
        oof, y, n_classes
    )
    return StackedModel(
        base_learners=base,
        meta=meta,
        meta_depth=best[0],
        meta_rate=best[1],
        meta_trees=best[2],
        grid_scores=grid_scores,
        base_scores=base_scores,
    )
