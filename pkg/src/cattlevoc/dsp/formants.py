"""Resonance-frequency estimation via Burg LPC and polynomial roots.

The signal is decimated to twice the formant ceiling, pre-emphasized, and
modeled per frame as an all-pole filter. Complex pole pairs inside the unit
circle map to candidate resonances; implausibly wide or out-of-band ones
are dropped.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import resample_poly

from ..audio import AudioClip
from ..errors import BandEmptyError
from .frames import frame_matrix, frame_starts, frame_times

# Resonances within this margin of 0 Hz or of the ceiling are edge artifacts.
_BAND_MARGIN_HZ = 50.0


@dataclass(frozen=True)
class FormantTracks:
    """Per-frame ascending resonance frequencies (ragged; may be empty)."""

    times_s: np.ndarray
    formants_hz: list
    n_formants: int
    ceiling_hz: float

    @property
    def n_frames(self) -> int:
        return len(self.formants_hz)

    def slot_means(self) -> np.ndarray:
        """Mean frequency per slot over the frames that filled that slot.

        Slots no frame ever filled come back as nan.
        """
        out = np.full(self.n_formants, np.nan)
        for i in range(self.n_formants):
            vals = [fr[i] for fr in self.formants_hz if len(fr) > i]
            if vals:
                out[i] = float(np.mean(vals))
        return out


def burg_lpc(x: np.ndarray, order: int) -> np.ndarray:
    """AR prediction polynomial [1, a1..ap] by Burg's method."""
    n = len(x)
    if order < 1:
        raise ValueError("order must be at least 1")
    if n <= order:
        raise ValueError(f"need more than {order} samples, got {n}")
    a = np.zeros(order + 1)
    a[0] = 1.0
    ef = np.asarray(x, dtype=np.float64).copy()
    eb = ef.copy()
    for k in range(1, order + 1):
        f = ef[k:]
        b = eb[k - 1 : n - 1]
        den = f @ f + b @ b
        if den < 1e-30:
            break
        refl = -2.0 * (f @ b) / den
        rev = a[k - 1 :: -1].copy()
        a[1 : k + 1] += refl * rev
        # f aliases ef; update through temporaries so both recursions see the
        # errors from the previous stage.
        new_f = f + refl * b
        eb[k:] = b + refl * f
        ef[k:] = new_f
    return a


def _frame_resonances(
    frame: np.ndarray, order: int, fs: float, band_lo: float, band_hi: float, max_bw: float
) -> np.ndarray:
    top = np.max(np.abs(frame))
    if top < 1e-12:
        return np.empty(0)
    # Unit-normalize so the fit does not depend on recording level.
    roots = np.roots(burg_lpc(frame / top, order))
    roots = roots[roots.imag > 0.0]
    mags = np.abs(roots)
    keep = mags < 1.0
    roots, mags = roots[keep], mags[keep]
    freqs = np.angle(roots) * fs / (2.0 * np.pi)
    bws = -np.log(mags) * fs / np.pi
    keep = (freqs > band_lo) & (freqs < band_hi) & (bws < max_bw)
    return np.sort(freqs[keep])


def estimate_formants(
    clip: AudioClip,
    n_formants: int = 8,
    ceiling_hz: float = 5000.0,
    window_s: float = 0.03,
    hop_s: float = 0.01,
    pre_emphasis: float = 0.97,
    max_bandwidth_hz: float = 700.0,
) -> FormantTracks:
    if n_formants < 1:
        raise ValueError("n_formants must be at least 1")
    if window_s <= 0 or hop_s <= 0:
        raise ValueError("window_s and hop_s must be positive")
    band_lo = _BAND_MARGIN_HZ
    band_hi = ceiling_hz - _BAND_MARGIN_HZ
    if band_hi <= band_lo:
        raise BandEmptyError(f"formant ceiling {ceiling_hz:g} Hz leaves an empty search band")

    sr = clip.sample_rate_hz
    if ceiling_hz > sr / 2.0:
        raise ValueError("formant ceiling must not exceed half the sample rate")
    x = clip.samples
    fs = sr
    target = 2.0 * ceiling_hz
    if target < sr:
        ratio = Fraction(int(round(target)), int(round(sr)))
        x = resample_poly(x, ratio.numerator, ratio.denominator, window=("kaiser", 9.0))
        fs = sr * ratio.numerator / ratio.denominator

    y = x.astype(np.float64).copy()
    y[1:] -= pre_emphasis * x[:-1]
    y[0] *= 1.0 - pre_emphasis

    order = 2 * n_formants + 2
    win = int(round(window_s * fs))
    if win <= order + 1:
        raise ValueError(f"window of {win} samples cannot support LPC order {order}")
    starts = frame_starts(len(y), win, max(1, int(round(hop_s * fs))))
    frames = frame_matrix(y, starts, win) * np.hanning(win)

    per_frame = [
        _frame_resonances(frames[t], order, fs, band_lo, band_hi, max_bandwidth_hz)[:n_formants]
        for t in range(len(starts))
    ]
    return FormantTracks(
        times_s=frame_times(starts, win, fs),
        formants_hz=per_frame,
        n_formants=n_formants,
        ceiling_hz=ceiling_hz,
    )
