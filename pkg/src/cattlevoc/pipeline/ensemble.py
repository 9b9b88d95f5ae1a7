"""Bagged ensemble of stacked models with majority-vote prediction.

Training canonicalizes feature column order by sorting names, and fitted
models are keyed by those names: inputs presented in any column order yield
identical predictions, provided the names match.
"""

import json
from dataclasses import dataclass

import numpy as np

from ..errors import FeatureMismatchError
from ..learners import GradientBoostedTrees, LogisticRegression, RandomForest
from .folds import DOMAIN_LEARNERS, derive_seed, subsample_bags
from .stacking import StackedModel, train_stacked

_LEARNER_KINDS = {
    "gbdt": GradientBoostedTrees,
    "forest": RandomForest,
    "logreg": LogisticRegression,
}

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class EnsembleModel:
    """r stacked models voting over a fixed class list.

    feature_names records the exact training column order (sorted by name);
    prediction inputs are realigned to it by name.
    """

    classes: tuple
    feature_names: tuple
    instances: tuple

    @property
    def r(self) -> int:
        return len(self.instances)

    def vote_matrix(self, x: np.ndarray):
        """Per-class vote counts and summed probabilities for aligned rows."""
        n = x.shape[0]
        k = len(self.classes)
        votes = np.zeros((n, k))
        prob_sums = np.zeros((n, k))
        rows = np.arange(n)
        for inst in self.instances:
            p = inst.predict_proba(x)
            votes[rows, p.argmax(axis=1)] += 1.0
            prob_sums += p
        return votes, prob_sums


def _align(model: EnsembleModel, x: np.ndarray, feature_names) -> np.ndarray:
    names = tuple(feature_names)
    if names == model.feature_names:
        return x
    lookup = {name: j for j, name in enumerate(names)}
    if len(lookup) != len(names) or set(names) != set(model.feature_names):
        raise FeatureMismatchError("input features do not match the model's")
    perm = [lookup[name] for name in model.feature_names]
    return x[:, perm]


def predict_batch(model: EnsembleModel, x: np.ndarray, feature_names) -> list:
    """Majority-vote labels; ties fall to summed probability, then class order."""
    x = _align(model, np.asarray(x, dtype=np.float64), feature_names)
    votes, prob_sums = model.vote_matrix(x)
    # Lexicographic argmax: vote differences are >= 1, the probability term
    # is < 1, and np.argmax already favors the lowest class index on ties.
    score = votes + prob_sums / (model.r + 1.0)
    return [model.classes[i] for i in score.argmax(axis=1)]


def predict(model: EnsembleModel, values: np.ndarray, feature_names=None) -> str:
    """Classify one feature vector given its feature names."""
    if feature_names is None:
        feature_names = model.feature_names
    return predict_batch(model, np.asarray(values, dtype=np.float64)[None, :], feature_names)[0]


def train_ensemble(
    x: np.ndarray,
    labels,
    classes,
    feature_names,
    r: int = 50,
    subsample_fraction: float = 0.9,
    min_inclusion: int = None,
    seed: int = 0,
) -> EnsembleModel:
    x = np.asarray(x, dtype=np.float64)
    classes = tuple(classes)
    names = tuple(feature_names)
    if x.shape[1] != len(names):
        raise FeatureMismatchError("feature name count does not match columns")
    index_of = {c: i for i, c in enumerate(classes)}
    y = np.array([index_of[lab] for lab in labels], dtype=np.int64)

    order = sorted(range(len(names)), key=lambda j: names[j])
    x = x[:, order]
    names = tuple(names[j] for j in order)

    if min_inclusion is None:
        min_inclusion = r // 2
    bags = subsample_bags(np.arange(len(y)), r, subsample_fraction, min_inclusion, seed)
    instances = tuple(
        train_stacked(x[bag], y[bag], len(classes), derive_seed(seed, DOMAIN_LEARNERS, i))
        for i, bag in enumerate(bags)
    )
    return EnsembleModel(classes=classes, feature_names=names, instances=instances)


def save_model(model: EnsembleModel, path) -> None:
    """Write a self-describing model file; byte-identical for equal models."""
    arrays = {}
    meta = {
        "version": MODEL_FORMAT_VERSION,
        "classes": list(model.classes),
        "feature_names": list(model.feature_names),
        "instances": [],
    }
    for i, inst in enumerate(model.instances):
        inst_meta = {
            "meta_depth": inst.meta_depth,
            "meta_rate": inst.meta_rate,
            "meta_trees": inst.meta_trees,
        }
        parts = dict(zip(("gbdt", "forest", "logreg"), inst.base_learners))
        parts["meta"] = inst.meta
        for part, learner in parts.items():
            scalars = {}
            for key, value in learner.to_state().items():
                if isinstance(value, np.ndarray):
                    arrays[f"i{i}.{part}.{key}"] = value
                else:
                    scalars[key] = value
            inst_meta[part] = scalars
        meta["instances"].append(inst_meta)
    arrays["_meta_json"] = np.frombuffer(
        json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8
    )
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_model(path) -> EnsembleModel:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(bytes(data["_meta_json"]).decode("utf-8"))
        if meta["version"] != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {meta['version']}")
        instances = []
        for i, inst_meta in enumerate(meta["instances"]):
            parts = {}
            for part in ("gbdt", "forest", "logreg", "meta"):
                state = dict(inst_meta[part])
                prefix = f"i{i}.{part}."
                for key in data.files:
                    if key.startswith(prefix):
                        state[key[len(prefix) :]] = data[key]
                kind = state["kind"] if part != "meta" else "gbdt"
                parts[part] = _LEARNER_KINDS[kind].from_state(state)
            instances.append(
                StackedModel(
                    base_learners=(parts["gbdt"], parts["forest"], parts["logreg"]),
                    meta=parts["meta"],
                    meta_depth=int(inst_meta["meta_depth"]),
                    meta_rate=float(inst_meta["meta_rate"]),
                    meta_trees=int(inst_meta["meta_trees"]),
                    grid_scores={},
                    base_scores={},
                )
            )
    return EnsembleModel(
        classes=tuple(meta["classes"]),
        feature_names=tuple(meta["feature_names"]),
        instances=tuple(instances),
    )
