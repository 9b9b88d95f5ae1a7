"""Minimal WAV reading for mono 16-bit PCM files."""

import wave

import numpy as np

from .errors import DataFileError


def read_wav(path: str) -> tuple[np.ndarray, int]:
    """Return (samples in [-1, 1] as float64, sample rate in Hz)."""
    try:
        with wave.open(path, "rb") as fh:
            if fh.getnchannels() != 1:
                raise DataFileError(f"{path}: expected mono audio")
            if fh.getsampwidth() != 2:
                raise DataFileError(f"{path}: expected 16-bit samples")
            sr = fh.getframerate()
            raw = fh.readframes(fh.getnframes())
    except wave.Error as exc:
        raise DataFileError(f"{path}: {exc}") from exc
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32767.0
    return np.clip(samples, -1.0, 1.0), sr
