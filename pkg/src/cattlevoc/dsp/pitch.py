"""Fundamental-frequency tracking via normalized cross-correlation.

Each frame correlates a window of one pitch-floor period against itself at
every candidate lag. The normalized peak doubles as a voicing decision and,
for voiced frames, as the harmonic-strength reading used downstream.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from ..audio import AudioClip
from ..errors import BandEmptyError
from .frames import frame_matrix, frame_starts, frame_times

# Relative strength at which a shorter candidate lag wins over the global
# peak; guards against halving errors on strongly harmonic calls.
_SUBLAG_PREFERENCE = 0.9


@dataclass(frozen=True)
class PitchContour:
    """Per-frame f0 estimates. Unvoiced frames hold nan in f0_hz."""

    times_s: np.ndarray
    f0_hz: np.ndarray
    strength: np.ndarray
    floor_hz: float
    ceiling_hz: float

    @property
    def voiced(self) -> np.ndarray:
        return np.isfinite(self.f0_hz)

    @property
    def n_voiced(self) -> int:
        return int(np.count_nonzero(self.voiced))


def _nccf(b: np.ndarray, width: int) -> np.ndarray:
    """Normalized cross-correlation rows: r[t, lag] for lag in [0, span-width]."""
    num = fftconvolve(b, b[:, width - 1 :: -1], mode="valid", axes=1)
    padded = np.concatenate([np.zeros((b.shape[0], 1)), np.cumsum(b * b, axis=1)], axis=1)
    energy = padded[:, width:] - padded[:, :-width]
    return num / np.sqrt(energy[:, :1] * energy + 1e-30)


def _pick_lag(row: np.ndarray, lag_min: int) -> int:
    tau = lag_min + int(np.argmax(row[lag_min:]))
    moved = True
    while moved:
        moved = False
        for divisor in (2, 3, 4):
            cand = int(round(tau / divisor))
            if cand < lag_min:
                continue
            lo = max(lag_min, cand - 2)
            hi = min(len(row) - 1, cand + 2)
            j = lo + int(np.argmax(row[lo : hi + 1]))
            if j < tau and row[j] >= _SUBLAG_PREFERENCE * row[tau]:
                tau = j
                moved = True
                break
    return tau


def _refine(row: np.ndarray, tau: int) -> float:
    """Parabolic interpolation of the peak position, in lag samples."""
    if not 0 < tau < len(row) - 1:
        return float(tau)
    y0, y1, y2 = row[tau - 1], row[tau], row[tau + 1]
    denom = y0 - 2.0 * y1 + y2
    if abs(denom) < 1e-12:
        return float(tau)
    delta = 0.5 * (y0 - y2) / denom
    return tau + float(np.clip(delta, -0.5, 0.5))


def estimate_f0(
    clip: AudioClip,
    floor_hz: float = 50.0,
    ceiling_hz: float = 2000.0,
    hop_s: float = 0.01,
    voicing_threshold: float = 0.45,
) -> PitchContour:
    if floor_hz <= 0 or ceiling_hz <= floor_hz:
        raise ValueError("need 0 < floor_hz < ceiling_hz")
    if hop_s <= 0:
        raise ValueError("hop_s must be positive")
    sr = clip.sample_rate_hz
    if sr / ceiling_hz < 2.0:
        raise BandEmptyError(f"pitch ceiling {ceiling_hz:g} Hz leaves no usable lags at {sr:g} Hz")
    lag_min = max(2, int(round(sr / ceiling_hz)))
    lag_max = int(np.ceil(sr / floor_hz))

    n = len(clip.samples)
    width = lag_max
    span = width + lag_max
    if n < span:
        # Clip shorter than two floor periods: analyze what is there in one frame.
        width = max(2, n // 2)
        lag_top = min(lag_max, n - width)
        starts = np.zeros(1, dtype=np.int64)
        span = n
        if lag_top < lag_min:
            times = frame_times(starts, span, sr)
            return PitchContour(times, np.full(1, np.nan), np.zeros(1), floor_hz, ceiling_hz)
    else:
        starts = frame_starts(n, span, max(1, int(round(hop_s * sr))))

    frames = frame_matrix(clip.samples, starts, span)
    r = _nccf(frames, width)

    f0 = np.full(len(starts), np.nan)
    strength = np.zeros(len(starts))
    for t in range(len(starts)):
        row = r[t]
        if len(row) <= lag_min:
            continue
        tau = _pick_lag(row, lag_min)
        peak = float(np.clip(row[tau], 0.0, 1.0))
        strength[t] = peak
        if peak >= voicing_threshold:
            f0[t] = float(np.clip(sr / _refine(row, tau), floor_hz, ceiling_hz))

    return PitchContour(
        times_s=frame_times(starts, span, sr),
        f0_hz=f0,
        strength=strength,
        floor_hz=floor_hz,
        ceiling_hz=ceiling_hz,
    )
