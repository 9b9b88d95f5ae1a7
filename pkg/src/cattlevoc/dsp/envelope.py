"""RMS amplitude envelope on the decibel scale."""

from dataclasses import dataclass

import numpy as np

from ..audio import AudioClip
from ..errors import ClipTooShortError
from .frames import frame_matrix, frame_starts, frame_times

# Silence floor; full scale is 0 dB.
DB_FLOOR = -96.0


@dataclass(frozen=True)
class EnvelopeDb:
    times_s: np.ndarray
    level_db: np.ndarray

    @property
    def n_frames(self) -> int:
        return len(self.level_db)


def amplitude_envelope(clip: AudioClip, frame_s: float = 0.03, hop_s: float = 0.01) -> EnvelopeDb:
    if hop_s <= 0 or frame_s < hop_s:
        raise ValueError("need frame_s >= hop_s > 0")
    if len(clip.samples) == 0:
        raise ClipTooShortError("clip is empty")
    sr = clip.sample_rate_hz
    win = max(1, int(round(frame_s * sr)))
    starts = frame_starts(len(clip.samples), win, max(1, int(round(hop_s * sr))))
    frames = frame_matrix(clip.samples, starts, win)
    # Hann-weighted mean square; a flat weight ripples audibly when frames
    # hold a non-integer number of cycles.
    weight = np.hanning(win) if win > 1 else np.ones(1)
    rms = np.sqrt((frames * frames) @ weight / np.sum(weight))
    with np.errstate(divide="ignore"):
        level = 20.0 * np.log10(rms)
    return EnvelopeDb(
        times_s=frame_times(starts, win, sr),
        level_db=np.maximum(level, DB_FLOOR),
    )
