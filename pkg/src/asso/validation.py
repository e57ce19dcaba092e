"""Small input-validation helpers used by the public entry points."""

import numpy as np

from .errors import InvalidParameterError


def check_signal_array(samples, name="samples"):
    """Coerce to a 1-D float or complex ndarray with at least 2 finite samples."""
    arr = np.asarray(samples)
    if arr.ndim != 1:
        raise InvalidParameterError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < 2:
        raise InvalidParameterError(f"{name} needs at least 2 samples, got {arr.size}")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=False)
        finite = np.isfinite(arr.real) & np.isfinite(arr.imag)
    else:
        arr = arr.astype(np.float64, copy=False)
        finite = np.isfinite(arr)
    if not finite.all():
        raise InvalidParameterError(f"{name} contains non-finite values")
    return arr


def check_positive(value, name):
    """Validate a strictly positive finite scalar and return it as float."""
    v = float(value)
    if not np.isfinite(v) or v <= 0.0:
        raise InvalidParameterError(f"{name} must be a positive finite number, got {value!r}")
    return v


def check_finite(value, name):
    v = float(value)
    if not np.isfinite(v):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return v


def check_in_open_interval(value, lo, hi, name):
    v = float(value)
    if not (lo < v < hi):
        raise InvalidParameterError(f"{name} must lie in ({lo}, {hi}), got {value!r}")
    return v


def check_odd_length(value, name):
    v = int(value)
    if v < 1 or v % 2 == 0:
        raise InvalidParameterError(f"{name} must be an odd integer >= 1, got {value!r}")
    return v


def check_choice(value, choices, name):
    if value not in choices:
        raise InvalidParameterError(f"{name} must be one of {sorted(choices)}, got {value!r}")
    return value
