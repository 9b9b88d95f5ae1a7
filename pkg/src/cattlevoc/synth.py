"""Synthetic fixtures: known-answer audio signals and a separable corpus.

Every generator is a pure function of its parameters (plus an integer seed
where noise is involved), so fixtures regenerate bit-identically anywhere.
The audio kinds back the analysis oracles: a sine or band-limited sawtooth
has a known fundamental, an AM tone has a known modulation rate and depth
in dB, and a resonator cascade has known formant centers.
"""
from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from .audio import AudioClip
from .corpus import FEATURE_NAMES, LabeledCorpus

_PEAK = 0.8


def _time(duration_s: float, sample_rate_hz: int) -> np.ndarray:
    n = int(round(duration_s * sample_rate_hz))
    if n < 1:
        raise ValueError("duration too short for one sample")
    return np.arange(n) / sample_rate_hz


def sine(freq_hz: float, duration_s: float, sample_rate_hz: int = 44100) -> AudioClip:
    t = _time(duration_s, sample_rate_hz)
    return AudioClip(_PEAK * np.sin(2 * np.pi * freq_hz * t), sample_rate_hz)


def sawtooth(
    freq_hz: float,
    duration_s: float,
    sample_rate_hz: int = 44100,
    n_harmonics: int = 20,
) -> AudioClip:
    """Band-limited sawtooth from n_harmonics sine partials at 1/h amplitude."""
    t = _time(duration_s, sample_rate_hz)
    sig = np.zeros_like(t)
    for h in range(1, n_harmonics + 1):
        if h * freq_hz >= sample_rate_hz / 2:
            break
        sig += np.sin(2 * np.pi * h * freq_hz * t) / h
    return AudioClip(_PEAK * sig / np.abs(sig).max(), sample_rate_hz)


def am_tone(
    carrier_hz: float,
    rate_hz: float,
    depth_db: float,
    duration_s: float,
    sample_rate_hz: int = 44100,
) -> AudioClip:
    """Tone whose amplitude swings depth_db peak-to-trough at rate_hz.

    The modulation starts at a trough, so a whole number of cycles puts
    every envelope maximum strictly inside the clip.
    """
    t = _time(duration_s, sample_rate_hz)
    up = 0.5 - 0.5 * np.cos(2 * np.pi * rate_hz * t)
    env = 10.0 ** (depth_db / 20.0 * (up - 1.0))
    return AudioClip(_PEAK * env * np.sin(2 * np.pi * carrier_hz * t), sample_rate_hz)


def formant_signal(
    centers_hz,
    duration_s: float,
    sample_rate_hz: int = 44100,
    bandwidths_hz=None,
    f0_hz: float | None = 150.0,
    seed: int = 0,
) -> tuple:
    """Source-filter fixture: excitation through all-pole resonators.

    The source is a pulse train at f0_hz, or white noise when f0_hz is None.
    Returns (clip, truth) where truth records the resonator centers and
    bandwidths plus the source parameters; it is what a formant estimate on
    the clip should recover.
    """
    centers = [float(c) for c in centers_hz]
    if not centers:
        raise ValueError("need at least one resonance center")
    if bandwidths_hz is None:
        bandwidths = [80.0 + 40.0 * i for i in range(len(centers))]
    else:
        bandwidths = [float(b) for b in bandwidths_hz]
    if len(bandwidths) != len(centers):
        raise ValueError("one bandwidth per center")
    for c in centers:
        if not 0 < c < sample_rate_hz / 2:
            raise ValueError(f"center {c} outside (0, Nyquist)")

    n = int(round(duration_s * sample_rate_hz))
    if f0_hz is None:
        src = np.random.default_rng(seed).normal(size=n)
    else:
        src = np.zeros(n)
        src[:: max(1, int(round(sample_rate_hz / f0_hz)))] = 1.0
    sig = src
    for c, b in zip(centers, bandwidths):
        rho = np.exp(-np.pi * b / sample_rate_hz)
        theta = 2 * np.pi * c / sample_rate_hz
        sig = lfilter([1.0], [1.0, -2 * rho * np.cos(theta), rho * rho], sig)
    sig = _PEAK * sig / np.abs(sig).max()
    truth = {
        "centers_hz": centers,
        "bandwidths_hz": bandwidths,
        "source": "pulse" if f0_hz is not None else "noise",
        "f0_hz": f0_hz,
    }
    return AudioClip(sig, sample_rate_hz), truth


def white_noise(duration_s: float, sample_rate_hz: int = 44100, seed: int = 0) -> AudioClip:
    n = int(round(duration_s * sample_rate_hz))
    sig = np.random.default_rng(seed).normal(size=n)
    return AudioClip(_PEAK * sig / np.abs(sig).max(), sample_rate_hz)


def blobs_corpus(n_classes: int, per_class: int, seed: int = 0) -> LabeledCorpus:
    """Separable synthetic corpus: class c sits 6 noise-sigmas out along
    feature axis c, unit-variance noise elsewhere. Cow identity equals the
    class; call type alternates HF for even classes, LF for odd, so both
    classification targets stay learnable.
    """
    if not 2 <= n_classes <= len(FEATURE_NAMES):
        raise ValueError(f"n_classes must be in [2, {len(FEATURE_NAMES)}]")
    if per_class < 1:
        raise ValueError("per_class must be positive")
    rng = np.random.default_rng(seed)
    rows, source_ids, cow_ids, call_types = [], [], [], []
    for c in range(n_classes):
        x = rng.normal(size=(per_class, len(FEATURE_NAMES)))
        x[:, c] += 6.0
        rows.append(x)
        for i in range(per_class):
            source_ids.append(f"blob{c:02d}_{i:03d}")
            cow_ids.append(f"cow{c:02d}")
            call_types.append("HF" if c % 2 == 0 else "LF")
    return LabeledCorpus(source_ids, np.vstack(rows), cow_ids, call_types)
