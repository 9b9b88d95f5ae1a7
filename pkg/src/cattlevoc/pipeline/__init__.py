"""Cross-validated stacked-ensemble protocol shared by both tasks."""

from .ensemble import (
    EnsembleModel,
    load_model,
    predict,
    predict_batch,
    save_model,
    train_ensemble,
)
from .evaluate import CVConfig, CVReport, TaskSpec, cross_validate, holdout_split, task_view
from .folds import round_robin_folds, stratified_folds, subsample_bags
from .metrics import FoldMetrics, accuracy, confusion_matrix, macro_f1, selection_loss
from .stacking import StackedModel, train_base_learners, train_stacked

__all__ = [
    "CVConfig",
    "CVReport",
    "EnsembleModel",
    "FoldMetrics",
    "StackedModel",
    "TaskSpec",
    "accuracy",
    "confusion_matrix",
    "cross_validate",
    "holdout_split",
    "load_model",
    "macro_f1",
    "predict",
    "predict_batch",
    "round_robin_folds",
    "save_model",
    "selection_loss",
    "stratified_folds",
    "subsample_bags",
    "task_view",
    "train_base_learners",
    "train_ensemble",
    "train_stacked",
]
