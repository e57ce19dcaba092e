"""Exception types shared across the toolkit.

The CLI maps these onto process exit codes, so library code should raise
the most specific class that applies rather than bare ValueError.
"""


class AssoError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(AssoError, ValueError):
    """A parameter is outside its documented domain (misuse, not data)."""


class DegenerateWindowError(AssoError):
    """Truncated window covers fewer than three samples at the requested sigma."""


class NoPeakError(AssoError):
    """No usable spectral peak (all magnitudes zero on the searched region)."""


class EmptyRidgeError(AssoError):
    """Ridge extraction started from a seed already at or below the stop threshold."""


class UndefinedEntropyError(AssoError):
    """Concentration entropy undefined because the local energy is zero."""


class InsufficientDataError(AssoError):
    """Not enough samples to carry out the requested estimate."""


class ConfigError(AssoError):
    """Malformed or inconsistent run configuration."""


class SignalIOError(AssoError):
    """Input file exists but cannot be parsed as a supported signal format."""
