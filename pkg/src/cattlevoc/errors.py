"""Exception taxonomy for the cattlevoc package.

Every error raised by the library derives from CattlevocError so callers
can catch one base class at the CLI boundary.
"""


class CattlevocError(Exception):
    """Base class for all cattlevoc errors."""


# --- audio / dataset errors ---------------------------------------------

class NotWavError(CattlevocError):
    """File is not a RIFF/WAVE container."""


class UnsupportedEncodingError(CattlevocError):
    """WAV encoding is not 16-bit integer PCM."""


class MultiChannelError(CattlevocError):
    """WAV has more than one channel (stereo inputs are rejected, not downmixed)."""


class TruncatedError(CattlevocError):
    """WAV data chunk is shorter than its declared size."""


class MissingFileError(CattlevocError):
    """Manifest references an audio file that does not exist."""


class BadTokenError(CattlevocError):
    """Manifest call_type token is not HF or LF."""


class EmptyManifestError(CattlevocError):
    """Manifest contains a header but no data rows."""


class HeaderMismatchError(CattlevocError):
    """Features CSV header does not match the canonical column order."""


class NonNumericCellError(CattlevocError):
    """Features CSV cell is not a finite number."""


# --- signal analysis errors ---------------------------------------------

class ClipTooShortError(CattlevocError):
    """Clip has no samples to analyze."""


class BandEmptyError(CattlevocError):
    """Pitch search band is empty (ceiling lag shorter than 2 samples)."""


class SilentClipError(CattlevocError):
    """All spectral power is zero; spectral statistics are undefined."""


class UnvoicedCallError(CattlevocError):
    """No voiced frame was found; F0 statistics are undefined."""


class ExtractionError(CattlevocError):
    """Corpus-level feature assembly failed (e.g. a feature is missing everywhere).

    failures carries the per-call (source_id, reason) pairs when every call
    was rejected, so callers can still log what went wrong.
    """

    def __init__(self, message: str, failures=()):
        super().__init__(message)
        self.failures = list(failures)


# --- pipeline errors ------------------------------------------------------

class ClassTooSmallError(CattlevocError):
    """A class has fewer members than the fold count."""

    def __init__(self, label, count, k):
        super().__init__(f"class {label!r} has {count} members, fewer than k={k}")
        self.label = label
        self.count = count
        self.k = k


class BadKError(CattlevocError):
    """Fold count below 2."""


class InfeasibleCoverageError(CattlevocError):
    """Requested minimum bag inclusion exceeds what the bag sizes can provide."""


class DegenerateBagError(CattlevocError):
    """A training bag contains a single class."""


class EmptyMetricsError(CattlevocError):
    """selection_loss called with no fold metrics."""


class FeatureMismatchError(CattlevocError):
    """Prediction input feature names do not match the model's."""
