"""WAV reading and the AudioClip container.

Only the format the recorders produced is accepted: RIFF/WAVE, integer PCM,
16-bit, mono. A small explicit parser is used instead of the stdlib wave
module so that each rejection reason maps to a distinct error type.
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    MissingFileError,
    MultiChannelError,
    NotWavError,
    TruncatedError,
    UnsupportedEncodingError,
)

# Integer full scale: dividing by 32768 maps the int16 minimum exactly to -1.0.
_FULL_SCALE = 32768.0

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class AudioClip:
    """One trimmed call: mono samples in [-1, 1] plus its sample rate."""

    samples: np.ndarray
    sample_rate_hz: int
    source_id: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if np.max(np.abs(samples)) > 1.0:
            raise ValueError("samples must lie in [-1, 1]")
        object.__setattr__(self, "samples", samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


def read_wav(path) -> AudioClip:
    """Read a mono 16-bit PCM WAV file into an AudioClip.

    Samples are scaled by 1/32768; source_id is the file stem.

    Raises NotWavError, UnsupportedEncodingError, MultiChannelError or
    TruncatedError depending on what is wrong with the file.
    """
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except FileNotFoundError:
        raise MissingFileError(f"{path} not found") from None

    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise NotWavError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    pcm = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise NotWavError(f"{path}: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if fmt is None:
                raise NotWavError(f"{path}: data chunk before fmt chunk")
            if len(body) < chunk_size:
                raise TruncatedError(
                    f"{path}: data chunk declares {chunk_size} bytes, "
                    f"only {len(body)} present"
                )
            pcm = body
            break
        # chunks are word-aligned
        pos += 8 + chunk_size + (chunk_size & 1)

    if fmt is None or pcm is None:
        raise NotWavError(f"{path}: missing fmt or data chunk")

    audio_format, n_channels, sample_rate, _, _, bits = fmt
    if audio_format not in (_WAVE_FORMAT_PCM, _WAVE_FORMAT_EXTENSIBLE):
        raise UnsupportedEncodingError(
            f"{path}: format tag {audio_format:#x} is not integer PCM"
        )
    if bits != 16:
        raise UnsupportedEncodingError(f"{path}: {bits}-bit, expected 16-bit")
    if n_channels != 1:
        raise MultiChannelError(f"{path}: {n_channels} channels, expected mono")
    if sample_rate <= 0:
        raise NotWavError(f"{path}: non-positive sample rate")
    if len(pcm) < 2:
        raise TruncatedError(f"{path}: empty data chunk")

    raw = np.frombuffer(pcm[: len(pcm) - (len(pcm) % 2)], dtype="<i2")
    samples = raw.astype(np.float64) / _FULL_SCALE
    stem = os.path.splitext(os.path.basename(path))[0]
    return AudioClip(samples=samples, sample_rate_hz=int(sample_rate), source_id=stem)


def write_wav(path, samples, sample_rate_hz: int) -> None:
    """Write float samples in [-1, 1] as a mono 16-bit PCM WAV file.

    The inverse of read_wav's scaling: values are multiplied by 32768 and
    clipped to the int16 range, so a round trip of synthesized fixtures is
    sample-exact as long as amplitudes stay at or below 32767/32768.
    """
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    samples = np.asarray(samples, dtype=np.float64)
    ints = np.clip(np.rint(samples * _FULL_SCALE), -32768, 32767).astype("<i2")
    pcm = ints.tobytes()
    byte_rate = sample_rate_hz * 2
    hdr = b"".join(
        [
            b"RIFF",
            struct.pack("<I", 36 + len(pcm)),
            b"WAVE",
            b"fmt ",
            struct.pack("<IHHIIHH", 16, _WAVE_FORMAT_PCM, 1, sample_rate_hz,
                        byte_rate, 2, 16),
            b"data",
            struct.pack("<I", len(pcm)),
        ]
    )
    with open(os.fspath(path), "wb") as fh:
        fh.write(hdr + pcm)
