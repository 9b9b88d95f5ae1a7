"""Fixed-size log-power spectrogram tensors for the sequence model.

The spectrogram uses the same analysis parameters as the feature pipeline
(30 ms Hann window, 10 ms hop, centered frame grid, rows scaled so a frame's
bin sum equals its windowed energy). The network wants one shape for every
clip, so the time axis is center-cropped or right-padded to 400 frames and
the frequency axis is cut or padded to 257 bins; padding is zero power,
which lands on the dB floor. A mask records which frames are real.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SilentClipError

N_FRAMES = 400
N_BINS = 257
WINDOW_S = 0.03
HOP_S = 0.01
# Relative floor inside the log; padding and silence sit 120 dB below the peak.
POWER_EPS = 1e-12


@dataclass(frozen=True)
class SpectrogramTensor:
    """Log-power grid of shape (N_FRAMES, N_BINS) plus a real-frame mask."""

    values: np.ndarray
    mask: np.ndarray
    n_real_frames: int
    source_id: str = ""

    def __post_init__(self):
        if self.values.shape != (N_FRAMES, N_BINS):
            raise ValueError(f"values must be {(N_FRAMES, N_BINS)}, got {self.values.shape}")
        if self.mask.shape != (N_FRAMES,):
            raise ValueError("mask must be one flag per frame")


def _power_spectrogram(samples: np.ndarray, sample_rate_hz: int) -> np.ndarray:
    win = int(round(WINDOW_S * sample_rate_hz))
    hop = max(1, int(round(HOP_S * sample_rate_hz)))
    n = len(samples)
    if n < win:
        starts = np.zeros(1, dtype=np.int64)
    else:
        count = (n - win) // hop + 1
        leftover = n - win - (count - 1) * hop
        starts = leftover // 2 + hop * np.arange(count, dtype=np.int64)
    frames = np.zeros((len(starts), win))
    for row, s in enumerate(starts):
        stop = min(int(s) + win, n)
        frames[row, : stop - int(s)] = samples[int(s) : stop]
    spectra = np.fft.rfft(frames * np.hanning(win), axis=1)
    scale = np.full(spectra.shape[1], 2.0 / win)
    scale[0] = 1.0 / win
    if win % 2 == 0:
        scale[-1] = 1.0 / win
    return (spectra.real**2 + spectra.imag**2) * scale


def build_tensor(samples: np.ndarray, sample_rate_hz: int, source_id: str = "") -> SpectrogramTensor:
    """Fixed-shape log-power tensor for one clip.

    Raises SilentClipError on all-zero input; a silent clip has no spectrum
    to standardize against.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1 or len(samples) == 0:
        raise ValueError("samples must be a non-empty 1-D array")
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    if not np.any(samples):
        raise SilentClipError(f"{source_id or 'clip'} is all zeros")

    power = _power_spectrogram(samples, sample_rate_hz)

    n_real = min(power.shape[0], N_FRAMES)
    grid = np.zeros((N_FRAMES, N_BINS))
    if power.shape[0] > N_FRAMES:
        # Keep the middle of long clips; calls sit centered in their cuts.
        lead = (power.shape[0] - N_FRAMES) // 2
        power = power[lead : lead + N_FRAMES]
    n_bins = min(power.shape[1], N_BINS)
    grid[:n_real, :n_bins] = power[:, :n_bins]

    floor = power.max() * POWER_EPS
    values = 10.0 * np.log10(grid + floor, dtype=np.float64)
    mask = np.zeros(N_FRAMES, dtype=bool)
    mask[:n_real] = True
    return SpectrogramTensor(
        values=values.astype(np.float32),
        mask=mask,
        n_real_frames=n_real,
        source_id=source_id,
    )


def fit_scaler(tensors: list) -> tuple[float, float]:
    """Mean and standard deviation of the real (unpadded) cells."""
    if not tensors:
        raise ValueError("need at least one tensor")
    cells = np.concatenate([t.values[t.mask].ravel() for t in tensors])
    std = float(cells.std())
    return float(cells.mean()), std if std > 0 else 1.0


def apply_scaler(tensor: SpectrogramTensor, mean: float, std: float) -> np.ndarray:
    """Standardized copy of the full grid, padded cells included."""
    return ((tensor.values - mean) / std).astype(np.float32)
