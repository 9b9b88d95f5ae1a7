"""Tensor construction: shapes, padding, masks, and the scaler."""

import numpy as np
import pytest

from dlbaseline.errors import SilentClipError
from dlbaseline.tensors import N_BINS, N_FRAMES, apply_scaler, build_tensor, fit_scaler

SR = 8000


def _tone(freq_hz, duration_s, sr=SR):
    t = np.arange(int(duration_s * sr)) / sr
    return 0.5 * np.sin(2.0 * np.pi * freq_hz * t)


def test_one_second_clip_fills_about_a_hundred_frames():
    t = build_tensor(_tone(500.0, 1.0), SR)
    assert t.values.shape == (N_FRAMES, N_BINS)
    assert t.values.dtype == np.float32
    # 10 ms hop: one second of audio is on the order of 100 frames.
    assert 90 <= t.n_real_frames <= 110
    assert t.mask.sum() == t.n_real_frames
    assert t.mask[: t.n_real_frames].all()
    assert not t.mask[t.n_real_frames :].any()


def test_long_clip_is_cropped_to_the_grid():
    t = build_tensor(_tone(500.0, 10.0), SR)
    assert t.n_real_frames == N_FRAMES
    assert t.mask.all()


def test_crop_keeps_the_middle_of_a_long_clip():
    clip = np.zeros(10 * SR)
    burst = _tone(1000.0, 0.2)
    clip[5 * SR : 5 * SR + len(burst)] = burst
    t = build_tensor(clip, SR)
    bin_hz = SR / round(0.03 * SR)
    col = int(round(1000.0 / bin_hz))
    peak_row = int(t.values[:, col].argmax())
    assert 150 <= peak_row <= 250


def test_padded_frames_sit_on_one_floor_value():
    t = build_tensor(_tone(500.0, 0.5), SR)
    padded = t.values[~t.mask]
    assert padded.size > 0
    assert np.ptp(padded) == 0.0
    assert padded.max() < t.values[t.mask].max() - 100.0


def test_missing_frequency_bins_are_floor_padded():
    # 30 ms at 8 kHz is a 240-sample window: 121 spectrum bins, rest padding.
    t = build_tensor(_tone(500.0, 0.5), SR)
    pad = t.values[:, 121:]
    assert np.ptp(pad) == 0.0
    assert pad.max() <= t.values[:, :121].min() + 1e-6


def test_high_rate_audio_has_no_frequency_padding():
    noise = np.random.default_rng(11).normal(0.0, 0.2, int(0.2 * 44100))
    t = build_tensor(np.clip(noise, -1, 1), 44100)
    assert t.values.shape == (N_FRAMES, N_BINS)
    assert np.isfinite(t.values).all()
    # Broadband input reaches the last column; nothing sits on a pad floor.
    assert np.ptp(t.values[t.mask][:, N_BINS - 1]) > 0.0


def test_rejects_degenerate_input():
    with pytest.raises(SilentClipError):
        build_tensor(np.zeros(SR), SR)
    with pytest.raises(ValueError):
        build_tensor(np.zeros(0), SR)
    with pytest.raises(ValueError):
        build_tensor(np.zeros((10, 2)), SR)
    with pytest.raises(ValueError):
        build_tensor(_tone(500.0, 0.5), 0)


def test_build_is_deterministic():
    clip = _tone(740.0, 0.7)
    a = build_tensor(clip, SR)
    b = build_tensor(clip, SR)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.mask, b.mask)


def test_scaler_standardizes_real_cells():
    tensors = [build_tensor(_tone(300.0 * (i + 1), 0.4), SR) for i in range(3)]
    mean, std = fit_scaler(tensors)
    cells = np.concatenate([apply_scaler(t, mean, std)[t.mask].ravel() for t in tensors])
    assert abs(cells.mean()) < 1e-4
    assert abs(cells.std() - 1.0) < 1e-4
    with pytest.raises(ValueError):
        fit_scaler([])
