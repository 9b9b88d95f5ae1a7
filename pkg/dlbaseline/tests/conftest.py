"""Shared fixtures: a small synthetic WAV corpus with published folds."""

import csv
import os
import wave

import numpy as np
import pytest

SR = 8000
DATASET_ENV = "CATTLEVOC_DATASET"
FOLDS_ENV = "CATTLEVOC_FOLDS"


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "dataset: needs the released recordings plus a fold file (env vars)"
    )


def write_wav(path, samples, sr=SR):
    pcm = np.clip(np.asarray(samples) * 32767.0, -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(sr)
        fh.writeframes(pcm.tobytes())


def tone(freq_hz, duration_s=0.35, sr=SR, amp=0.4):
    t = np.arange(int(duration_s * sr)) / sr
    return amp * np.sin(2.0 * np.pi * freq_hz * t)


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    """16 tone clips, 2 call types x 4 cows, 2 published folds.

    HF calls are 2400 Hz, LF 400 Hz; which band a clip sits in is obvious
    from its spectrogram, so even a barely trained model has signal.
    """
    root = tmp_path_factory.mktemp("corpus")
    rng = np.random.default_rng(42)
    rows = []
    for i in range(16):
        ct = "HF" if i < 8 else "LF"
        cow = f"c{i % 4 + 1}"
        base = 2400.0 if ct == "HF" else 400.0
        sid = f"call{i:02d}"
        clip = tone(base + rng.uniform(-30, 30)) + rng.normal(0, 0.01, int(0.35 * SR))
        write_wav(root / f"{sid}.wav", np.clip(clip, -1, 1))
        fold = i % 2
        rows.append((sid, cow, ct, fold))

    manifest = root / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("file", "cow_id", "call_type"))
        for sid, cow, ct, _ in rows:
            writer.writerow((f"{sid}.wav", cow, ct))

    folds = root / "folds.csv"
    with open(folds, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("source_id", "cow_id", "call_type", "fold"))
        writer.writerows(rows)

    return {"root": str(root), "manifest": str(manifest), "folds": str(folds), "rows": rows}


@pytest.fixture(scope="session")
def dataset_paths():
    manifest = os.environ.get(DATASET_ENV)
    folds = os.environ.get(FOLDS_ENV)
    if not manifest or not folds:
        pytest.skip(f"set {DATASET_ENV} and {FOLDS_ENV} to run released-data checks")
    return manifest, folds
