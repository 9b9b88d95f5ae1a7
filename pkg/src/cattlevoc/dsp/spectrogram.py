"""Short-time power spectrogram and the scalar statistics read off it."""

from dataclasses import dataclass

import numpy as np

from ..audio import AudioClip
from ..errors import ClipTooShortError, SilentClipError
from .frames import frame_matrix, frame_starts, frame_times

# Additive floor inside the spectral-flatness log ratio.
FLATNESS_EPS = 1e-12


@dataclass(frozen=True)
class Spectrogram:
    """Hann-windowed short-time power spectrum.

    power[t, k] holds energy, scaled so that summing a frame's row over all
    bins reproduces the energy of that windowed frame (Parseval).
    """

    power: np.ndarray
    freqs_hz: np.ndarray
    times_s: np.ndarray
    window_s: float
    hop_s: float
    sample_rate_hz: float

    @property
    def n_frames(self) -> int:
        return self.power.shape[0]

    @property
    def n_bins(self) -> int:
        return self.power.shape[1]


@dataclass(frozen=True)
class SpectralStats:
    q25_hz: float
    q50_hz: float
    q75_hz: float
    fpeak_hz: float
    wiener_entropy_mean: float


def spectrogram(clip: AudioClip, window_s: float = 0.03, hop_s: float = 0.01) -> Spectrogram:
    if window_s <= 0 or hop_s <= 0:
        raise ValueError("window_s and hop_s must be positive")
    if hop_s > window_s:
        raise ValueError("hop_s must not exceed window_s")
    if len(clip.samples) == 0:
        raise ClipTooShortError("clip is empty")
    sr = clip.sample_rate_hz
    win = int(round(window_s * sr))
    hop = max(1, int(round(hop_s * sr)))
    if win < 16:
        raise ValueError(f"window of {win} samples is too short to analyze")

    starts = frame_starts(len(clip.samples), win, hop)
    frames = frame_matrix(clip.samples, starts, win)
    window = np.hanning(win)
    spectra = np.fft.rfft(frames * window, axis=1)

    # Fold the negative-frequency half back in so row sums match frame energy.
    scale = np.full(spectra.shape[1], 2.0 / win)
    scale[0] = 1.0 / win
    if win % 2 == 0:
        scale[-1] = 1.0 / win
    power = (spectra.real**2 + spectra.imag**2) * scale

    freqs = np.arange(spectra.shape[1]) * (sr / win)
    return Spectrogram(
        power=power,
        freqs_hz=freqs,
        times_s=frame_times(starts, win, sr),
        window_s=window_s,
        hop_s=hop_s,
        sample_rate_hz=sr,
    )


def spectral_stats(sg: Spectrogram) -> SpectralStats:
    """Energy quartiles, peak frequency, and mean log spectral flatness.

    Quartiles come from the time-averaged spectrum: qX is the lowest bin
    frequency at which cumulative energy reaches X% of the total. Flatness
    is log10(geometric mean / arithmetic mean) per frame, averaged.
    """
    mean_spectrum = sg.power.mean(axis=0)
    # The quartile targets are fractions of the same running sum they are
    # compared against; a separately computed total can differ in the last
    # bit and move an exact-boundary quartile by one bin.
    cum = np.cumsum(mean_spectrum)
    total = float(cum[-1])
    if total <= 0.0:
        raise SilentClipError("clip has no spectral energy")
    quartiles = []
    for frac in (0.25, 0.50, 0.75):
        idx = int(np.searchsorted(cum, frac * total, side="left"))
        quartiles.append(float(sg.freqs_hz[min(idx, sg.n_bins - 1)]))

    peak = float(sg.freqs_hz[int(np.argmax(mean_spectrum))])

    # The log(0) guard is relative to each frame's own level so that scaling
    # the clip cannot move the flatness reading. All-zero frames are flat.
    frame_mean = sg.power.mean(axis=1, keepdims=True)
    p = sg.power + FLATNESS_EPS * frame_mean
    with np.errstate(divide="ignore", invalid="ignore"):
        flatness = np.mean(np.log10(p), axis=1) - np.log10(np.mean(p, axis=1))
    flatness = np.where(frame_mean[:, 0] > 0.0, flatness, 0.0)
    return SpectralStats(
        q25_hz=quartiles[0],
        q50_hz=quartiles[1],
        q75_hz=quartiles[2],
        fpeak_hz=peak,
        wiener_entropy_mean=float(np.mean(flatness)),
    )
