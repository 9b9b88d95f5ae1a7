"""WAV reading, writing, and the failure taxonomy."""

import struct

import numpy as np
import pytest

from cattlevoc.audio import AudioClip, read_wav, write_wav
from cattlevoc.errors import (
    MissingFileError,
    MultiChannelError,
    NotWavError,
    TruncatedError,
    UnsupportedEncodingError,
)


def _wav_bytes(data, n_channels=1, bits=16, sr=44100, fmt_code=1, clip_data_size=None):
    """Hand-rolled RIFF container so malformed variants are easy to produce."""
    byte_rate = sr * n_channels * bits // 8
    block = n_channels * bits // 8
    fmt = struct.pack("<HHIIHH", fmt_code, n_channels, sr, byte_rate, block, bits)
    size = len(data) if clip_data_size is None else clip_data_size
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", size) + data
    return b"RIFF" + struct.pack("<I", len(body)) + body


def test_round_trip_preserves_samples(tmp_path):
    path = tmp_path / "tone.wav"
    x = np.sin(np.linspace(0, 20, 1000)) * 0.5
    write_wav(path, x, 22050)
    clip = read_wav(path)
    assert clip.sample_rate_hz == 22050
    assert len(clip.samples) == 1000
    # One 16-bit quantization step of slack.
    assert np.max(np.abs(clip.samples - x)) <= 1.0 / 32767


def test_full_scale_negative_sample_maps_to_minus_one(tmp_path):
    path = tmp_path / "fs.wav"
    data = struct.pack("<3h", -32768, 0, 32767)
    path.write_bytes(_wav_bytes(data))
    clip = read_wav(path)
    assert clip.samples[0] == pytest.approx(-1.0)
    assert clip.samples[1] == 0.0
    assert clip.samples[2] == pytest.approx(32767 / 32768)


def test_not_a_wav_file(tmp_path):
    path = tmp_path / "x.wav"
    path.write_bytes(b"ID3\x04" + b"\x00" * 60)
    with pytest.raises(NotWavError):
        read_wav(path)


def test_float_encoding_rejected(tmp_path):
    path = tmp_path / "f32.wav"
    path.write_bytes(_wav_bytes(b"\x00" * 8, bits=32, fmt_code=3))
    with pytest.raises(UnsupportedEncodingError):
        read_wav(path)


def test_stereo_rejected(tmp_path):
    path = tmp_path / "st.wav"
    path.write_bytes(_wav_bytes(struct.pack("<4h", 1, 2, 3, 4), n_channels=2))
    with pytest.raises(MultiChannelError):
        read_wav(path)


def test_truncated_data_chunk(tmp_path):
    path = tmp_path / "cut.wav"
    data = struct.pack("<4h", 1, 2, 3, 4)
    path.write_bytes(_wav_bytes(data, clip_data_size=len(data) + 100))
    with pytest.raises(TruncatedError):
        read_wav(path)


def test_missing_file(tmp_path):
    with pytest.raises(MissingFileError):
        read_wav(tmp_path / "absent.wav")


def test_clip_validation():
    with pytest.raises(ValueError):
        AudioClip(samples=np.zeros(10), sample_rate_hz=0)
    with pytest.raises(ValueError):
        AudioClip(samples=np.zeros((2, 10)), sample_rate_hz=44100)
    clip = AudioClip(samples=np.zeros(441), sample_rate_hz=44100)
    assert clip.duration_s == pytest.approx(0.01)


def test_write_rejects_bad_rate(tmp_path):
    with pytest.raises(ValueError):
        write_wav(tmp_path / "bad.wav", np.zeros(10), 0)
