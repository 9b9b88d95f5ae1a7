"""Signal analysis primitives: spectrogram, pitch, formants, envelope."""

from .envelope import EnvelopeDb, amplitude_envelope
from .formants import FormantTracks, burg_lpc, estimate_formants
from .pitch import PitchContour, estimate_f0
from .spectrogram import Spectrogram, spectral_stats, spectrogram

__all__ = [
    "EnvelopeDb",
    "FormantTracks",
    "PitchContour",
    "Spectrogram",
    "amplitude_envelope",
    "burg_lpc",
    "estimate_f0",
    "estimate_formants",
    "spectral_stats",
    "spectrogram",
]
