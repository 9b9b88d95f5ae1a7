"""Assembly of the 23 per-call features from the signal analyses.

One call in, one fixed-order feature vector out. Corpus-level extraction
adds median imputation for formant slots that never stabilized, so every
row handed to the classifier is complete.
"""

from dataclasses import dataclass, fields

import numpy as np
from scipy.signal import find_peaks

from .audio import read_wav
from .corpus import FEATURE_NAMES, N_FEATURES, LabeledCorpus
from .dsp import (
    amplitude_envelope,
    estimate_f0,
    estimate_formants,
    spectral_stats,
    spectrogram,
)
from .dsp.envelope import EnvelopeDb
from .errors import CattlevocError, ExtractionError, SilentClipError, UnvoicedCallError

# A local envelope maximum must rise this far above its surroundings to
# count as an amplitude modulation; sub-dB jitter is ignored.
AM_PROMINENCE_DB = 2.0

# Clamp range for the per-frame autocorrelation peak inside the
# harmonics-to-noise log ratio.
_HNR_R_MIN = 0.01
_HNR_R_MAX = 0.999


@dataclass(frozen=True)
class AnalysisConfig:
    """Extraction settings; defaults cover both low- and high-pitched calls."""

    window_s: float = 0.03
    hop_s: float = 0.01
    pitch_floor_hz: float = 50.0
    pitch_ceiling_hz: float = 2000.0
    voicing_threshold: float = 0.45
    formant_ceiling_hz: float = 5000.0
    n_formants: int = 8
    pre_emphasis: float = 0.97
    max_formant_bandwidth_hz: float = 700.0


@dataclass(frozen=True)
class AmMetrics:
    am_var_db_per_s: float
    am_rate_per_s: float
    am_extent_db: float


@dataclass(frozen=True)
class CallFeatures:
    """The 23 per-call features, in canonical column order.

    Formant means and dispersal may be nan when too few frames produced
    stable resonances; corpus-level extraction imputes those.
    """

    f0_mean_hz: float
    f0_max_hz: float
    f0_min_hz: float
    f0_range_hz: float
    q25_hz: float
    q50_hz: float
    q75_hz: float
    fpeak_hz: float
    sound_duration_s: float
    am_var_db_per_s: float
    am_rate_per_s: float
    am_extent_db: float
    harmonicity_db: float
    f1_mean_hz: float
    f2_mean_hz: float
    f3_mean_hz: float
    f4_mean_hz: float
    f5_mean_hz: float
    f6_mean_hz: float
    f7_mean_hz: float
    f8_mean_hz: float
    formant_dispersal_hz: float
    wiener_entropy_mean: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=np.float64)


assert len(fields(CallFeatures)) == N_FEATURES == len(FEATURE_NAMES)


def am_metrics(env: EnvelopeDb, duration_s: float) -> AmMetrics:
    """Amplitude-modulation summary of a dB envelope.

    am_var is the cumulative absolute level change per second. Modulations
    are local maxima with prominence of at least AM_PROMINENCE_DB; each one's
    extent is its height above the mean of the two flanking troughs (the
    envelope minima toward the neighboring modulation or clip edge).
    """
    level = np.asarray(env.level_db, dtype=np.float64)
    if len(level) < 2:
        raise ValueError("envelope must have at least 2 frames")
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")

    am_var = float(np.sum(np.abs(np.diff(level)))) / duration_s

    peaks, _ = find_peaks(level, prominence=AM_PROMINENCE_DB)
    if len(peaks) == 0:
        return AmMetrics(am_var, 0.0, 0.0)

    extents = []
    for i, p in enumerate(peaks):
        lo = peaks[i - 1] + 1 if i > 0 else 0
        hi = peaks[i + 1] if i + 1 < len(peaks) else len(level)
        left = float(np.min(level[lo:p]))
        right = float(np.min(level[p + 1 : hi]))
        extents.append(level[p] - 0.5 * (left + right))
    return AmMetrics(am_var, len(peaks) / duration_s, float(np.mean(extents)))


def _dispersal(slot_means: np.ndarray) -> float:
    """Smallest gap between adjacent formant means; nan without a valid pair."""
    gaps = [
        slot_means[i + 1] - slot_means[i]
        for i in range(len(slot_means) - 1)
        if np.isfinite(slot_means[i]) and np.isfinite(slot_means[i + 1])
    ]
    return float(min(gaps)) if gaps else float("nan")


def extract_features(clip, cfg: AnalysisConfig = AnalysisConfig()) -> CallFeatures:
    # Diagnose digital silence directly; it would otherwise read as unvoiced.
    if not np.any(clip.samples):
        raise SilentClipError("clip is all zeros")
    contour = estimate_f0(
        clip,
        floor_hz=cfg.pitch_floor_hz,
        ceiling_hz=cfg.pitch_ceiling_hz,
        hop_s=cfg.hop_s,
        voicing_threshold=cfg.voicing_threshold,
    )
    if contour.n_voiced == 0:
        raise UnvoicedCallError("no voiced frames found")
    f0 = contour.f0_hz[contour.voiced]
    r = np.clip(contour.strength[contour.voiced], _HNR_R_MIN, _HNR_R_MAX)
    harmonicity = float(np.mean(10.0 * np.log10(r / (1.0 - r))))

    stats = spectral_stats(spectrogram(clip, cfg.window_s, cfg.hop_s))
    env = amplitude_envelope(clip, cfg.window_s, cfg.hop_s)
    am = am_metrics(env, clip.duration_s)

    # Recordings sampled below twice the configured ceiling cannot see that
    # far up; analyze to the Nyquist instead of rejecting the clip.
    ceiling_hz = min(cfg.formant_ceiling_hz, clip.sample_rate_hz / 2.0)
    tracks = estimate_formants(
        clip,
        n_formants=cfg.n_formants,
        ceiling_hz=ceiling_hz,
        window_s=cfg.window_s,
        hop_s=cfg.hop_s,
        pre_emphasis=cfg.pre_emphasis,
        max_bandwidth_hz=cfg.max_formant_bandwidth_hz,
    )
    slot_means = tracks.slot_means()

    return CallFeatures(
        f0_mean_hz=float(np.mean(f0)),
        f0_max_hz=float(np.max(f0)),
        f0_min_hz=float(np.min(f0)),
        f0_range_hz=float(np.max(f0) - np.min(f0)),
        q25_hz=stats.q25_hz,
        q50_hz=stats.q50_hz,
        q75_hz=stats.q75_hz,
        fpeak_hz=stats.fpeak_hz,
        sound_duration_s=clip.duration_s,
        am_var_db_per_s=am.am_var_db_per_s,
        am_rate_per_s=am.am_rate_per_s,
        am_extent_db=am.am_extent_db,
        harmonicity_db=harmonicity,
        f1_mean_hz=float(slot_means[0]),
        f2_mean_hz=float(slot_means[1]),
        f3_mean_hz=float(slot_means[2]),
        f4_mean_hz=float(slot_means[3]),
        f5_mean_hz=float(slot_means[4]),
        f6_mean_hz=float(slot_means[5]),
        f7_mean_hz=float(slot_means[6]),
        f8_mean_hz=float(slot_means[7]),
        formant_dispersal_hz=_dispersal(slot_means),
        wiener_entropy_mean=stats.wiener_entropy_mean,
    )


@dataclass(frozen=True)
class CorpusExtraction:
    """Result of extracting a whole manifest.

    corpus holds imputed, complete vectors; measured[i, j] is False where
    column j of row i was filled in with the corpus median. failures lists
    (source_id, error message) for calls that produced no row at all.
    """

    corpus: LabeledCorpus
    measured: np.ndarray
    failures: list


def impute_missing(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Replace non-finite cells with their column median over finite rows."""
    x = np.array(x, dtype=np.float64)
    measured = np.isfinite(x)
    for j in range(x.shape[1]):
        bad = ~measured[:, j]
        if not bad.any():
            continue
        good = x[measured[:, j], j]
        x[bad, j] = float(np.median(good)) if len(good) else 0.0
    return x, measured


def extract_corpus(entries, cfg: AnalysisConfig = AnalysisConfig()) -> CorpusExtraction:
    source_ids, rows, cow_ids, call_types, failures = [], [], [], [], []
    for entry in entries:
        try:
            clip = read_wav(entry.path)
            feats = extract_features(clip, cfg)
        except (CattlevocError, ValueError) as exc:
            failures.append((entry.source_id, f"{type(exc).__name__}: {exc}"))
            continue
        source_ids.append(entry.source_id)
        rows.append(feats.as_array())
        cow_ids.append(entry.label.cow_id)
        call_types.append(entry.label.call_type)

    if not rows:
        raise ExtractionError(
            f"no call produced features; {len(failures)} of {len(failures)} failed",
            failures=failures,
        )
    x, measured = impute_missing(np.stack(rows))
    corpus = LabeledCorpus(
        source_ids=tuple(source_ids),
        x=x,
        cow_ids=tuple(cow_ids),
        call_types=tuple(call_types),
        feature_names=FEATURE_NAMES,
    )
    return CorpusExtraction(corpus=corpus, measured=measured, failures=failures)
