"""Gradient-boosted decision trees with softmax leaves.

One tree per boosting round carries a vector leaf (one value per class), so
multiclass cost grows with the class count inside the leaves rather than in
the tree count. Trees split on quantile-binned features; fitted trees store
the raw edge value, so prediction never needs the binning tables.

Training is prefix-deterministic: the first t rounds of a T-round fit are
identical to a t-round fit, which makes evaluating several tree counts from
a single fit exact rather than approximate.
"""

import numpy as np

from ._kernels import boosted_scores, fit_boosted_trees
from .binning import MAX_BINS, bin_codes, bin_edges


def _softmax(f: np.ndarray) -> np.ndarray:
    z = f - f.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class GradientBoostedTrees:
    """Level-wise histogram GBDT minimizing multinomial log loss."""

    def __init__(
        self,
        n_rounds: int = 200,
        depth: int = 3,
        learning_rate: float = 0.1,
        min_child: int = 5,
        l2: float = 1.0,
    ):
        if n_rounds < 1 or depth < 1 or learning_rate <= 0 or min_child < 1 or l2 < 0:
            raise ValueError("invalid hyperparameters")
        self.n_rounds = n_rounds
        self.depth = depth
        self.learning_rate = learning_rate
        self.min_child = min_child
        self.l2 = l2
        self.n_classes = 0
        self._feat = None
        self._thr = None
        self._val = None

    def fit(self, x: np.ndarray, y: np.ndarray, n_classes: int) -> "GradientBoostedTrees":
        x = np.ascontiguousarray(x, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.int64)
        n, m = x.shape
        k = int(n_classes)
        edges = [bin_edges(x[:, j]) for j in range(m)]
        codes = bin_codes(x, edges)

        feat, bins, val = fit_boosted_trees(
            codes, y, k, self.n_rounds, self.depth, self.learning_rate, self.min_child, self.l2
        )

        # splits on "code <= b" become "x < edges[b]" on raw values
        padded = np.zeros((m, MAX_BINS))
        for j in range(m):
            padded[j, : edges[j].size] = edges[j]
        thr = np.zeros(feat.shape)
        split = feat >= 0
        thr[split] = padded[feat[split], bins[split]]

        self.n_classes = k
        self._feat, self._thr, self._val = feat, thr, val
        return self

    def decision_scores(self, x: np.ndarray, n_rounds: int = None) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=np.float64)
        t_stop = self.n_rounds if n_rounds is None else min(n_rounds, self.n_rounds)
        return boosted_scores(x, self._feat, self._thr, self._val, t_stop)

    def predict_proba(self, x: np.ndarray, n_rounds: int = None) -> np.ndarray:
        return _softmax(self.decision_scores(x, n_rounds))

    def to_state(self) -> dict:
        return {
            "kind": "gbdt",
            "n_rounds": self.n_rounds,
            "depth": self.depth,
            "learning_rate": self.learning_rate,
            "min_child": self.min_child,
            "l2": self.l2,
            "n_classes": self.n_classes,
            "feat": self._feat,
            "thr": self._thr,
            "val": self._val,
        }

    @classmethod
    def from_state(cls, state: dict) -> "GradientBoostedTrees":
        model = cls(
            n_rounds=int(state["n_rounds"]),
            depth=int(state["depth"]),
            learning_rate=float(state["learning_rate"]),
            min_child=int(state["min_child"]),
            l2=float(state["l2"]),
        )
        model.n_classes = int(state["n_classes"])
        model._feat = np.asarray(state["feat"], dtype=np.int32)
        model._thr = np.asarray(state["thr"], dtype=np.float64)
        model._val = np.asarray(state["val"], dtype=np.float64)
        return model
