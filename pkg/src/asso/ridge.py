"""Ridge extraction on a time-frequency matrix and chirp-rate estimation.

A ridge is a per-frame frequency track following a local magnitude maximum.
Detection seeds at the global peak and marches outward one frame at a time,
restricting each frame's argmax to a band of half-width lambda0 around the
previous frame's ridge frequency; it stops in each direction when the
on-ridge magnitude falls to the stop threshold or the record ends.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyRidgeError, InvalidParameterError, NoPeakError


@dataclass(frozen=True)
class Ridge:
    """Per-frame ridge track over a contiguous frame range of the parent record."""

    start_frame: int
    bin_indices: np.ndarray
    eta_hz: np.ndarray
    magnitude: np.ndarray
    seed_frame: int

    def __post_init__(self):
        bins = np.asarray(self.bin_indices, dtype=int)
        eta = np.asarray(self.eta_hz, dtype=float)
        mag = np.asarray(self.magnitude, dtype=float)
        if not (bins.ndim == eta.ndim == mag.ndim == 1 and bins.size == eta.size == mag.size >= 1):
            raise InvalidParameterError("ridge arrays must be 1-D and of equal nonzero length")
        start = int(self.start_frame)
        seed = int(self.seed_frame)
        if not start <= seed < start + bins.size:
            raise InvalidParameterError("seed frame must lie inside the ridge support")
        object.__setattr__(self, "start_frame", start)
        object.__setattr__(self, "seed_frame", seed)
        object.__setattr__(self, "bin_indices", bins)
        object.__setattr__(self, "eta_hz", eta)
        object.__setattr__(self, "magnitude", mag)

    def __len__(self):
        return self.bin_indices.size

    @property
    def stop_frame(self):
        return self.start_frame + self.bin_indices.size

    def frames(self):
        return np.arange(self.start_frame, self.stop_frame)


@dataclass(frozen=True)
class ChirpRateTrack:
    """Estimated chirp rate (Hz/s) per frame of a ridge support."""

    start_frame: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1 or not np.isfinite(vals).all():
            raise InvalidParameterError("chirp-rate track must be a finite 1-D array")
        object.__setattr__(self, "start_frame", int(self.start_frame))
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size


def _positive_bin_start(grid):
    # first bin with eta > 0 (detection never rides the zero-frequency bin)
    return int(np.searchsorted(grid.bins_hz, 0.0, side="right"))


def global_peak(tf):
    """Row and column of the largest magnitude over bins with eta > 0.

    Returns (frame_row, bin_index) into tf.values.  Raises NoPeakError when
    every magnitude in the searched region is zero.
    """
    k0 = _positive_bin_start(tf.grid)
    if k0 >= len(tf.grid):
        raise NoPeakError("grid has no positive-frequency bins")
    mag = np.abs(tf.values[:, k0:])
    flat = int(np.argmax(mag))
    if mag.flat[flat] == 0.0:
        raise NoPeakError("all magnitudes are zero; nothing to seed a ridge")
    row, col = np.unravel_index(flat, mag.shape)
    return int(row), int(col) + k0


def detect_ridge(tf, seed, lambda0, gamma2_abs):
    """March a ridge outward from `seed` = (frame_row, bin_index).

    `lambda0` is the search half-width in Hz, a scalar or one value per tf
    frame.  `gamma2_abs` is the absolute stop threshold: a frame whose in-band
    maximum is at or below it ends the support on that side.
    """
    n_frames, n_bins = tf.values.shape
    row0, col0 = int(seed[0]), int(seed[1])
    if not (0 <= row0 < n_frames and 0 <= col0 < n_bins):
        raise InvalidParameterError(f"seed {seed} outside tf of shape {tf.values.shape}")
    lam = np.broadcast_to(np.asarray(lambda0, dtype=float), (n_frames,))
    if (lam <= 0).any():
        raise InvalidParameterError("lambda0 must be positive")
    gamma2_abs = float(gamma2_abs)
    mag = np.abs(tf.values)
    k0 = _positive_bin_start(tf.grid)
    if col0 < k0:
        raise InvalidParameterError("seed bin must have eta > 0")
    if mag[row0, col0] <= gamma2_abs:
        raise EmptyRidgeError("seed magnitude already at or below the stop threshold")

    bins = tf.grid.bins_hz

    def march(row_iter, eta_start):
        out = []
        eta_prev = eta_start
        for n in row_iter:
            lo, hi = tf.grid.band_indices(eta_prev - lam[n], eta_prev + lam[n])
            lo = max(lo, k0)
            if hi <= lo:
                break
            k = lo + int(np.argmax(mag[n, lo:hi]))
            if mag[n, k] <= gamma2_abs:
                break
            out.append((n, k))
            eta_prev = bins[k]
        return out

    right = march(range(row0 + 1, n_frames), bins[col0])
    left = march(range(row0 - 1, -1, -1), bins[col0])
    rows = [n for n, _ in reversed(left)] + [row0] + [n for n, _ in right]
    cols = [k for _, k in reversed(left)] + [col0] + [k for _, k in right]
    cols = np.asarray(cols, dtype=int)
    rows = np.asarray(rows, dtype=int)
    return Ridge(
        start_frame=tf.frame_offset + int(rows[0]),
        bin_indices=cols,
        eta_hz=bins[cols],
        magnitude=mag[rows, cols],
        seed_frame=tf.frame_offset + row0,
    )


def estimate_chirp_rate(ridge, sample_rate, fit_halfwidth):
    """Least-squares slope of the ridge frequency over a sliding window.

    `fit_halfwidth` (samples, scalar or per support frame) sets the window
    [i - w, i + w], truncated at the support edges.  Windows with fewer than
    3 points fall back to a zero rate.
    """
    n = len(ridge)
    w = np.broadcast_to(np.asarray(fit_halfwidth, dtype=int), (n,))
    if (w < 1).any():
        raise InvalidParameterError("fit_halfwidth must be >= 1 sample")
    dt = 1.0 / sample_rate
    eta = ridge.eta_hz
    out = np.zeros(n)
    for i in range(n):
        lo = max(0, i - w[i])
        hi = min(n, i + w[i] + 1)
        if hi - lo < 3:
            continue
        u = np.arange(lo, hi) * dt
        u = u - u.mean()
        y = eta[lo:hi]
        out[i] = float(u @ (y - y.mean()) / (u @ u))
    return ChirpRateTrack(start_frame=ridge.start_frame, values=out)
