"""Cross-validated evaluation of the two classification tasks."""

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from ..corpus import LabeledCorpus
from ..manifest import CALL_TYPES
from ._parallel import pmap
from .ensemble import predict_batch, train_ensemble
from .folds import DOMAIN_FOLD_ENSEMBLE, derive_seed, stratified_folds
from .metrics import FoldMetrics, accuracy, confusion_matrix, macro_f1

TARGETS = ("calltype", "cowid")
SUBSETS = ("all", "hf", "lf")


@dataclass(frozen=True)
class TaskSpec:
    """What to classify and on which part of the corpus."""

    target: str
    subset: str = "all"

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        if self.subset not in SUBSETS:
            raise ValueError(f"unknown subset {self.subset!r}")
        if self.target == "calltype" and self.subset != "all":
            raise ValueError("call-type classification uses the whole corpus")


@dataclass(frozen=True)
class CVConfig:
    """Protocol knobs; defaults follow the reporting protocol."""

    k: int = 5
    r: int = 50
    subsample_fraction: float = 0.9
    seed: int = 0
    min_inclusion: int = None
    jobs: int = 1

    def __post_init__(self):
        if not 0 < self.subsample_fraction <= 1:
            raise ValueError("subsample_fraction must be in (0, 1]")
        if self.min_inclusion is not None and not 0 <= self.min_inclusion <= self.r:
            raise ValueError("min_inclusion must lie in [0, r]")

    @property
    def effective_min_inclusion(self) -> int:
        return self.r // 2 if self.min_inclusion is None else self.min_inclusion


def task_view(corpus: LabeledCorpus, task: TaskSpec):
    """Rows, labels, and the ordered class list the task trains on."""
    if task.subset == "all":
        view = corpus
    else:
        wanted = task.subset.upper()
        view = corpus.subset(np.array([ct == wanted for ct in corpus.call_types], dtype=bool))
    if task.target == "calltype":
        labels = list(view.call_types)
        classes = tuple(CALL_TYPES)
    else:
        labels = list(view.cow_ids)
        classes = tuple(sorted(set(labels)))
    return view, labels, classes


@dataclass(frozen=True)
class CVReport:
    task: TaskSpec
    k: int
    r: int
    seed: int
    classes: tuple
    source_ids: tuple
    fold_assignment: np.ndarray
    train_metrics: tuple
    test_metrics: tuple
    confusions: tuple = field(repr=False)

    def _mean_std(self, metrics, attr):
        vals = np.array([getattr(m, attr) for m in metrics])
        return float(vals.mean()), float(vals.std(ddof=1)) if len(vals) > 1 else 0.0

    @property
    def test_accuracy(self):
        return self._mean_std(self.test_metrics, "accuracy")

    @property
    def train_accuracy(self):
        return self._mean_std(self.train_metrics, "accuracy")

    @property
    def test_f1(self):
        return self._mean_std(self.test_metrics, "f1")

    def to_dict(self) -> dict:
        train_mean, train_std = self.train_accuracy
        test_mean, test_std = self.test_accuracy
        f1_mean, f1_std = self.test_f1
        return {
            "task": {"target": self.task.target, "subset": self.task.subset},
            "protocol": {"k": self.k, "r": self.r, "seed": self.seed},
            "classes": list(self.classes),
            "folds": [
                {
                    "index": tm.index,
                    "train_accuracy": trm.accuracy,
                    "train_f1": trm.f1,
                    "test_accuracy": tm.accuracy,
                    "test_f1": tm.f1,
                    "confusion": conf.tolist(),
                }
                for trm, tm, conf in zip(self.train_metrics, self.test_metrics, self.confusions)
            ],
            "summary": {
                "train_accuracy_mean": train_mean,
                "train_accuracy_std": train_std,
                "test_accuracy_mean": test_mean,
                "test_accuracy_std": test_std,
                "test_f1_mean": f1_mean,
                "test_f1_std": f1_std,
            },
        }


def _run_fold(args, x, labels, classes, feature_names, cfg):
    fold_index, folds = args
    test = folds == fold_index
    train = ~test
    labels_arr = np.array(labels)
    model = train_ensemble(
        x[train],
        labels_arr[train],
        classes,
        feature_names,
        r=cfg.r,
        subsample_fraction=cfg.subsample_fraction,
        min_inclusion=cfg.effective_min_inclusion,
        seed=derive_seed(cfg.seed, DOMAIN_FOLD_ENSEMBLE, fold_index),
    )
    index_of = {c: i for i, c in enumerate(classes)}
    out = {}
    for split_name, mask in (("train", train), ("test", test)):
        pred = predict_batch(model, x[mask], feature_names)
        true_idx = [index_of[t] for t in labels_arr[mask]]
        pred_idx = [index_of[p] for p in pred]
        conf = confusion_matrix(true_idx, pred_idx, len(classes))
        out[split_name] = (
            FoldMetrics(index=fold_index, accuracy=accuracy(true_idx, pred_idx), f1=macro_f1(conf)),
            conf,
        )
    return out


def cross_validate(corpus: LabeledCorpus, task: TaskSpec, cfg: CVConfig) -> CVReport:
    view, labels, classes = task_view(corpus, task)
    folds = stratified_folds(labels, cfg.k, cfg.seed)
    worker = partial(
        _run_fold,
        x=view.x,
        labels=labels,
        classes=classes,
        feature_names=view.feature_names,
        cfg=cfg,
    )
    results = pmap(worker, [(f, folds) for f in range(cfg.k)], cfg.jobs)
    return CVReport(
        task=task,
        k=cfg.k,
        r=cfg.r,
        seed=cfg.seed,
        classes=classes,
        source_ids=view.source_ids,
        fold_assignment=folds,
        train_metrics=tuple(res["train"][0] for res in results),
        test_metrics=tuple(res["test"][0] for res in results),
        confusions=tuple(res["test"][1] for res in results),
    )


def holdout_split(labels, seed: int):
    """Stratified 80/20 split: fold 0 of a 5-fold assignment is the test side."""
    folds = stratified_folds(labels, 5, seed)
    test = folds == 0
    return np.flatnonzero(~test), np.flatnonzero(test)
