"""Training loop and fixed-fold evaluation.

Folds come from the pipeline's assignment file, never from here: the
baseline scores the exact splits the feature model scored, so the two
reports are comparable row for row. Each fold trains one network from
scratch with a seed derived from (config seed, fold index).
"""

import copy
import json
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .audio import read_wav
from .datafiles import labels_for, read_fold_file, read_wav_paths
from .errors import DataFileError
from .model import ConvGru
from .tensors import apply_scaler, build_tensor, fit_scaler


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    learning_rate: float = 1e-3
    max_epochs: int = 50
    patience: int = 5
    val_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("batch_size, max_epochs, and patience must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in [0, 1)")


def _val_split(y: np.ndarray, fraction: float, rng: np.random.Generator) -> tuple:
    """Stratified holdout for early stopping.

    Classes too small to give anything up (fewer than 3 samples) stay in
    the training side whole; if nothing can be held out, validation is
    skipped entirely.
    """
    val = []
    if fraction > 0:
        for cls in np.unique(y):
            idx = np.flatnonzero(y == cls)
            if len(idx) < 3:
                continue
            take = min(max(1, round(fraction * len(idx))), len(idx) - 2)
            val.extend(rng.permutation(idx)[:take])
    val = np.array(sorted(val), dtype=np.int64)
    train = np.setdiff1d(np.arange(len(y)), val)
    return train, val


def _forward_in_chunks(model: ConvGru, grids, n_frames, chunk: int) -> torch.Tensor:
    outs = []
    with torch.no_grad():
        for i in range(0, len(grids), chunk):
            outs.append(model(grids[i : i + chunk], n_frames[i : i + chunk]))
    return torch.cat(outs)


def train_dl(
    grids: np.ndarray,
    n_frames: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    cfg: TrainConfig,
) -> ConvGru:
    """Fit one network on standardized grids.

    With a validation split the loop stops when validation loss has not
    improved for `patience` epochs and keeps the best weights. Without one
    (val_fraction 0 or classes too small) it runs until the model labels
    its whole training set correctly or the epoch budget runs out.
    """
    if not len(grids) == len(n_frames) == len(y):
        raise ValueError("grids, n_frames, and y must align")
    rng = np.random.default_rng(cfg.seed)
    torch.manual_seed(int(rng.integers(2**63)))
    train_idx, val_idx = _val_split(y, cfg.val_fraction, rng)

    xs = torch.from_numpy(np.ascontiguousarray(grids, dtype=np.float32))
    nf = torch.from_numpy(np.asarray(n_frames, dtype=np.int64))
    ys = torch.from_numpy(np.asarray(y, dtype=np.int64))

    model = ConvGru(n_classes)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    order_gen = torch.Generator().manual_seed(int(rng.integers(2**63)))

    best_loss = np.inf
    best_state = None
    stall = 0
    for _ in range(cfg.max_epochs):
        model.train()
        perm = train_idx[torch.randperm(len(train_idx), generator=order_gen).numpy()]
        correct = 0
        for i in range(0, len(perm), cfg.batch_size):
            batch = perm[i : i + cfg.batch_size]
            logits = model(xs[batch], nf[batch])
            loss = loss_fn(logits, ys[batch])
            opt.zero_grad()
            loss.backward()
            opt.step()
            correct += int((logits.argmax(dim=1) == ys[batch]).sum())

        model.eval()
        if len(val_idx) == 0:
            if correct == len(train_idx):
                break
            continue
        val_logits = _forward_in_chunks(model, xs[val_idx], nf[val_idx], cfg.batch_size)
        val_loss = float(loss_fn(val_logits, ys[val_idx]))
        if val_loss < best_loss:
            best_loss = val_loss
            best_state = copy.deepcopy(model.state_dict())
            stall = 0
        else:
            stall += 1
            if stall >= cfg.patience:
                break
    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    return model


def predict(model: ConvGru, grids: np.ndarray, n_frames: np.ndarray, batch_size: int = 32) -> np.ndarray:
    xs = torch.from_numpy(np.ascontiguousarray(grids, dtype=np.float32))
    nf = torch.from_numpy(np.asarray(n_frames, dtype=np.int64))
    logits = _forward_in_chunks(model, xs, nf, batch_size)
    return logits.argmax(dim=1).numpy()


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray, n_classes: int) -> np.ndarray:
    conf = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(conf, (y_true, y_pred), 1)
    return conf


def accuracy(conf: np.ndarray) -> float:
    return float(np.trace(conf) / conf.sum())


def macro_f1(conf: np.ndarray) -> float:
    # Per-class F1 with an F1 of 0 where precision + recall is 0.
    tp = np.diag(conf).astype(np.float64)
    denom = conf.sum(axis=0) + conf.sum(axis=1)
    with np.errstate(invalid="ignore"):
        f1 = np.where(denom > 0, 2.0 * tp / denom, 0.0)
    return float(f1.mean())


def _fold_seed(seed: int, fold: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(fold,)).generate_state(1)[0])


def evaluate_dl(
    manifest_path: str,
    folds_path: str,
    target: str,
    cfg: TrainConfig,
    audio_root: str | None = None,
    subset: str = "all",
    log=None,
) -> dict:
    """Cross-validate on the pipeline's published fold assignments.

    Returns the report as a plain dict in the same JSON shape the pipeline
    writes. The fold file defines the cohort; rows filtered out upstream
    (a call-type subset, say) simply are not in it, and `subset` only
    labels the report.
    """
    say = log if log is not None else (lambda _msg: None)
    rows = read_fold_file(folds_path)
    paths = read_wav_paths(manifest_path, audio_root)
    missing = [r.source_id for r in rows if r.source_id not in paths]
    if missing:
        raise DataFileError(f"fold file rows missing from manifest: {missing[:5]}")

    say(f"building {len(rows)} spectrogram tensors")
    tensors = [build_tensor(*read_wav(paths[r.source_id]), source_id=r.source_id) for r in rows]
    n_frames = np.array([t.n_real_frames for t in tensors], dtype=np.int64)
    labels, classes = labels_for(rows, target)
    y = np.array([classes.index(lab) for lab in labels], dtype=np.int64)
    folds = np.array([r.fold for r in rows], dtype=np.int64)
    k = int(folds.max()) + 1

    fold_entries = []
    accs = {"train_accuracy": [], "test_accuracy": [], "test_f1": []}
    for fold in range(k):
        test = folds == fold
        train = ~test
        mean, std = fit_scaler([t for t, keep in zip(tensors, train) if keep])
        grids = np.stack([apply_scaler(t, mean, std) for t in tensors])
        fold_cfg = TrainConfig(
            batch_size=cfg.batch_size,
            learning_rate=cfg.learning_rate,
            max_epochs=cfg.max_epochs,
            patience=cfg.patience,
            val_fraction=cfg.val_fraction,
            seed=_fold_seed(cfg.seed, fold),
        )
        say(f"fold {fold}: training on {int(train.sum())} calls")
        model = train_dl(grids[train], n_frames[train], y[train], len(classes), fold_cfg)

        pred_train = predict(model, grids[train], n_frames[train], cfg.batch_size)
        pred_test = predict(model, grids[test], n_frames[test], cfg.batch_size)
        conf_train = confusion_matrix(y[train], pred_train, len(classes))
        conf_test = confusion_matrix(y[test], pred_test, len(classes))
        entry = {
            "index": fold,
            "train_accuracy": accuracy(conf_train),
            "train_f1": macro_f1(conf_train),
            "test_accuracy": accuracy(conf_test),
            "test_f1": macro_f1(conf_test),
            "confusion": conf_test.tolist(),
        }
        say(
            f"fold {fold}: test accuracy {100 * entry['test_accuracy']:.1f}% "
            f"({int(test.sum())} calls)"
        )
        fold_entries.append(entry)
        accs["train_accuracy"].append(entry["train_accuracy"])
        accs["test_accuracy"].append(entry["test_accuracy"])
        accs["test_f1"].append(entry["test_f1"])

    def _mean_std(vals):
        arr = np.array(vals)
        return float(arr.mean()), float(arr.std(ddof=1)) if len(arr) > 1 else 0.0

    train_mean, train_std = _mean_std(accs["train_accuracy"])
    test_mean, test_std = _mean_std(accs["test_accuracy"])
    f1_mean, f1_std = _mean_std(accs["test_f1"])
    return {
        "task": {"target": target, "subset": subset},
        "protocol": {"k": k, "r": 0, "seed": cfg.seed},
        "classes": list(classes),
        "folds": fold_entries,
        "summary": {
            "train_accuracy_mean": train_mean,
            "train_accuracy_std": train_std,
            "test_accuracy_mean": test_mean,
            "test_accuracy_std": test_std,
            "test_f1_mean": f1_mean,
            "test_f1_std": f1_std,
        },
    }


def write_report(report: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
