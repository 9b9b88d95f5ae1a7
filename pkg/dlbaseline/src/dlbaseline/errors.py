"""Error types raised by this package."""


class DlBaselineError(Exception):
    """Base class for errors raised by this package."""


class SilentClipError(DlBaselineError):
    """The clip is digital silence; no spectrogram statistics exist."""


class DataFileError(DlBaselineError):
    """A manifest or fold-assignment file is malformed or inconsistent."""
