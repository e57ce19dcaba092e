"""Component recovery from on-ridge transform values.

A real oscillatory component is read off the transform along its ridge.  The
plain sinusoidal read-out doubles the real part; the chirp-model read-out
first multiplies by branch_sqrt(1 - 2j pi sigma^2 r) to undo the amplitude
and phase bias a linear chirp induces on the windowed transform.  For
complex-valued components the same expressions apply without the doubling
and without taking the real part.
"""

from dataclasses import dataclass

import numpy as np

from .core import branch_sqrt
from .errors import InvalidParameterError
from .ridge import ChirpRateTrack, Ridge
from .validation import check_finite, check_positive


def _on_ridge_values(tf, ridge):
    rows = ridge.frames() - tf.frame_offset
    if rows[0] < 0 or rows[-1] >= tf.values.shape[0]:
        raise InvalidParameterError("ridge support extends beyond the tf frame range")
    return tf.values[rows, ridge.bin_indices]


def _track_values(track, ridge, name):
    if isinstance(track, ChirpRateTrack):
        if track.start_frame != ridge.start_frame or len(track) != len(ridge):
            raise InvalidParameterError(f"{name} is not aligned with the ridge support")
        return track.values
    vals = np.asarray(track, dtype=float)
    if vals.ndim == 0:
        return np.full(len(ridge), float(vals))
    if vals.shape != (len(ridge),):
        raise InvalidParameterError(f"{name} must be a scalar or one value per ridge frame")
    return vals


def _sigma_values(tf, ridge, sigma_track):
    if sigma_track is None:
        rows = ridge.frames() - tf.frame_offset
        return tf.sigma_track.values[rows]
    vals = np.asarray(getattr(sigma_track, "values", sigma_track), dtype=float)
    if vals.ndim == 0:
        vals = np.full(len(ridge), float(vals))
    if vals.shape != (len(ridge),) or (vals <= 0).any():
        raise InvalidParameterError("sigma track must hold one positive value per ridge frame")
    return vals


def chirp_correction(sigma, r):
    """branch_sqrt(1 - 2j pi sigma^2 r): amplitude/phase correction at chirp rate r."""
    sigma = np.asarray(sigma, dtype=float)
    r = np.asarray(r, dtype=float)
    return branch_sqrt(1.0 - 2j * np.pi * sigma * sigma * r)


def recover_sinusoidal(tf, ridge):
    """Sinusoidal-model read-out: 2 Re{ V(t, ridge) } per support frame."""
    return 2.0 * _on_ridge_values(tf, ridge).real


def recover_chirp(tf, ridge, chirp_track, sigma_track=None):
    """Chirp-model read-out: 2 Re{ chirp_correction(sigma, r) V(t, ridge) }.

    `sigma_track` defaults to the widths the transform was computed with;
    pass explicit values only when they differ (they should not).
    """
    vals = _on_ridge_values(tf, ridge)
    r = _track_values(chirp_track, ridge, "chirp_track")
    sigma = _sigma_values(tf, ridge, sigma_track)
    return 2.0 * (chirp_correction(sigma, r) * vals).real


def recover_complex(tf, ridge, chirp_track=None, sigma_track=None):
    """Complex-component read-out: no doubling, no real part.

    With `chirp_track` given the chirp correction is applied, otherwise the
    on-ridge values are returned as-is (the sinusoidal complex model).
    """
    vals = _on_ridge_values(tf, ridge)
    if chirp_track is None:
        return vals.copy()
    r = _track_values(chirp_track, ridge, "chirp_track")
    sigma = _sigma_values(tf, ridge, sigma_track)
    return chirp_correction(sigma, r) * vals


def error_bound_sinusoidal(amplitude, sigma, r):
    """Worst-case sinusoidal-model read-out error for an exact linear chirp.

    2 pi sigma^2 |r| A / [ (1 + 4 pi^2 sigma^4 r^2)^{1/4}
                           (1 + sqrt(1 + 4 pi^2 sigma^4 r^2))^{1/2} ].
    """
    amplitude = check_finite(amplitude, "amplitude")
    sigma = check_positive(sigma, "sigma")
    r = check_finite(r, "r")
    b2 = 4.0 * np.pi**2 * sigma**4 * r * r
    return float(
        2.0 * np.pi * sigma**2 * abs(r) * abs(amplitude) / ((1.0 + b2) ** 0.25 * (1.0 + np.sqrt(1.0 + b2)) ** 0.5)
    )


@dataclass(frozen=True)
class RecoveredComponent:
    """One separated component: samples over its ridge support."""

    samples: np.ndarray
    ridge: Ridge
    chirp_track: ChirpRateTrack
    sigma_track: np.ndarray
    model: str = "chirp"

    def __post_init__(self):
        samples = np.asarray(self.samples)
        sigma = np.asarray(self.sigma_track, dtype=float)
        n = len(self.ridge)
        if samples.shape != (n,) or sigma.shape != (n,) or len(self.chirp_track) != n:
            raise InvalidParameterError("component arrays must align with the ridge support")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sigma_track", sigma)

    @property
    def start_frame(self):
        return self.ridge.start_frame

    @property
    def stop_frame(self):
        return self.ridge.stop_frame

    def full_samples(self, n_total):
        """Zero-extend the support samples to a record of n_total samples."""
        out = np.zeros(int(n_total), dtype=self.samples.dtype)
        out[self.start_frame : self.stop_frame] = self.samples
        return out
