"""Spectrogram conv-GRU baseline scored on the feature pipeline's folds."""

__version__ = "0.1.0"

from .errors import DataFileError, DlBaselineError, SilentClipError
from .model import ConvGru
from .tensors import N_BINS, N_FRAMES, SpectrogramTensor, apply_scaler, build_tensor, fit_scaler
from .training import TrainConfig, evaluate_dl, predict, train_dl, write_report

__all__ = [
    "ConvGru",
    "DataFileError",
    "DlBaselineError",
    "N_BINS",
    "N_FRAMES",
    "SilentClipError",
    "SpectrogramTensor",
    "TrainConfig",
    "apply_scaler",
    "build_tensor",
    "evaluate_dl",
    "fit_scaler",
    "predict",
    "train_dl",
    "write_report",
    "__version__",
]
