"""Shared frame-grid arithmetic.

Every analysis in this package slices the signal into overlapping frames.
The grid is centered: whatever does not fit an integer number of hops is
split evenly between the two ends, so analyses with the same frame and hop
sizes see the same time axis.
"""

import numpy as np


def frame_starts(n_samples: int, frame_len: int, hop: int) -> np.ndarray:
    """Start indices of a centered frame grid.

    A signal shorter than one frame yields a single frame starting at 0
    (the caller pads it).
    """
    if frame_len <= 0 or hop <= 0:
        raise ValueError("frame_len and hop must be positive")
    if n_samples < frame_len:
        return np.zeros(1, dtype=np.int64)
    count = (n_samples - frame_len) // hop + 1
    leftover = n_samples - frame_len - (count - 1) * hop
    return leftover // 2 + hop * np.arange(count, dtype=np.int64)


def frame_matrix(x: np.ndarray, starts: np.ndarray, frame_len: int) -> np.ndarray:
    """Stack frames into a (n_frames, frame_len) array, zero-padding past the end."""
    out = np.zeros((len(starts), frame_len), dtype=np.float64)
    n = len(x)
    for row, s in enumerate(starts):
        stop = min(int(s) + frame_len, n)
        out[row, : stop - int(s)] = x[int(s) : stop]
    return out


def frame_times(starts: np.ndarray, frame_len: int, sample_rate_hz: float) -> np.ndarray:
    """Frame-center times in seconds."""
    return (starts + frame_len / 2.0) / sample_rate_hz
