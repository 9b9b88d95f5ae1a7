"""Random forest on binned features with per-node feature subsampling."""

import math

import numpy as np

from ._kernels import forest_proba, grow_forest
from .binning import bin_codes, bin_edges


class RandomForest:
    """Bootstrap-aggregated gini trees; probabilities average leaf mixtures.

    Node split search inspects a seeded random feature order and keeps
    looking past max_features until some valid split turns up, so trees
    only stop where a node is genuinely unsplittable.
    """

    def __init__(
        self,
        n_trees: int = 100,
        max_features: str = "sqrt",
        min_leaf: int = 1,
        max_depth: int = 64,
        seed: int = 0,
    ):
        if n_trees < 1 or min_leaf < 1 or max_depth < 1:
            raise ValueError("invalid hyperparameters")
        self.n_trees = n_trees
        self.max_features = max_features
        self.min_leaf = min_leaf
        self.max_depth = max_depth
        self.seed = int(seed)
        self.n_classes = 0
        self._edges = None
        self._arrays = None

    def fit(self, x: np.ndarray, y: np.ndarray, n_classes: int) -> "RandomForest":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        m = x.shape[1]
        self._edges = [bin_edges(x[:, j]) for j in range(m)]
        codes = bin_codes(x, self._edges)
        if self.max_features == "sqrt":
            mf = max(1, int(round(math.sqrt(m))))
        else:
            mf = min(m, int(self.max_features))
        feat, bins, left, right, dist, n_nodes = grow_forest(
            codes,
            y,
            int(n_classes),
            self.n_trees,
            mf,
            self.min_leaf,
            self.max_depth,
            np.uint64(self.seed & 0xFFFFFFFFFFFFFFFF),
        )
        top = int(n_nodes.max())
        self._arrays = (
            feat[:, :top].copy(),
            bins[:, :top].copy(),
            left[:, :top].copy(),
            right[:, :top].copy(),
            dist[:, :top].astype(np.float32),
        )
        self.n_classes = int(n_classes)
        return self

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        codes = bin_codes(np.asarray(x, dtype=np.float64), self._edges)
        return forest_proba(codes, *self._arrays)

    def to_state(self) -> dict:
        feat, bins, left, right, dist = self._arrays
        return {
            "kind": "forest",
            "n_trees": self.n_trees,
            "max_features": str(self.max_features),
            "min_leaf": self.min_leaf,
            "max_depth": self.max_depth,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "feat": feat,
            "bins": bins,
            "left": left,
            "right": right,
            "dist": dist,
            "edges_flat": np.concatenate(self._edges) if self._edges else np.empty(0),
            "edges_len": np.array([len(e) for e in self._edges], dtype=np.int64),
        }

    @classmethod
    def from_state(cls, state: dict) -> "RandomForest":
        model = cls(
            n_trees=int(state["n_trees"]),
            max_features=str(state["max_features"]),
            min_leaf=int(state["min_leaf"]),
            max_depth=int(state["max_depth"]),
            seed=int(state["seed"]),
        )
        model.n_classes = int(state["n_classes"])
        model._arrays = (
            np.asarray(state["feat"], dtype=np.int32),
            np.asarray(state["bins"], dtype=np.uint8),
            np.asarray(state["left"], dtype=np.int32),
            np.asarray(state["right"], dtype=np.int32),
            np.asarray(state["dist"], dtype=np.float32),
        )
        flat = np.asarray(state["edges_flat"], dtype=np.float64)
        lens = np.asarray(state["edges_len"], dtype=np.int64)
        model._edges = []
        pos = 0
        for ln in lens:
            model._edges.append(flat[pos : pos + ln])
            pos += int(ln)
        return model
