"""Network mechanics and the capacity sanity check."""

import numpy as np
import pytest
import torch

from dlbaseline.model import ConvGru
from dlbaseline.tensors import N_BINS, N_FRAMES, apply_scaler, build_tensor, fit_scaler
from dlbaseline.training import TrainConfig, predict, train_dl

SR = 8000


def test_forward_shapes_and_gradients():
    torch.manual_seed(0)
    model = ConvGru(3)
    x = torch.randn(2, N_FRAMES, N_BINS)
    n_frames = torch.tensor([N_FRAMES, 1])
    logits = model(x, n_frames)
    assert logits.shape == (2, 3)
    assert torch.isfinite(logits).all()
    logits.sum().backward()
    grads = [p.grad for p in model.parameters()]
    assert all(g is not None for g in grads)
    assert any(float(g.abs().sum()) > 0 for g in grads)


def test_forward_rejects_wrong_grid():
    model = ConvGru(2)
    with pytest.raises(ValueError):
        model(torch.randn(2, 100, N_BINS), torch.tensor([100, 100]))
    with pytest.raises(ValueError):
        ConvGru(1)


def _toy_batch(n_per_class=16, seed=3):
    rng = np.random.default_rng(seed)
    tensors, labels = [], []
    for i in range(2 * n_per_class):
        if i < n_per_class:
            t = np.arange(int(0.4 * SR)) / SR
            clip = 0.5 * np.sin(2.0 * np.pi * (2400.0 + rng.uniform(-50, 50)) * t)
            labels.append(0)
        else:
            clip = rng.normal(0.0, 0.2, int(0.4 * SR))
            labels.append(1)
        tensors.append(build_tensor(np.clip(clip, -1, 1), SR))
    mean, std = fit_scaler(tensors)
    grids = np.stack([apply_scaler(t, mean, std) for t in tensors])
    n_frames = np.array([t.n_real_frames for t in tensors])
    return grids, n_frames, np.array(labels)


def test_single_batch_overfit():
    # Capacity check: 32 samples, up to 200 epochs, expect near-perfect recall.
    grids, n_frames, y = _toy_batch()
    cfg = TrainConfig(batch_size=32, max_epochs=200, val_fraction=0.0, seed=0)
    model = train_dl(grids, n_frames, y, 2, cfg)
    acc = float((predict(model, grids, n_frames) == y).mean())
    assert acc >= 0.95


def test_training_is_deterministic():
    grids, n_frames, y = _toy_batch(n_per_class=4, seed=5)
    cfg = TrainConfig(batch_size=8, max_epochs=2, val_fraction=0.0, seed=9)
    pred_a = predict(train_dl(grids, n_frames, y, 2, cfg), grids, n_frames)
    pred_b = predict(train_dl(grids, n_frames, y, 2, cfg), grids, n_frames)
    assert np.array_equal(pred_a, pred_b)


def test_train_config_validation():
    for bad in (
        dict(batch_size=0),
        dict(max_epochs=0),
        dict(patience=0),
        dict(learning_rate=0.0),
        dict(val_fraction=1.0),
    ):
        with pytest.raises(ValueError):
            TrainConfig(**bad)
