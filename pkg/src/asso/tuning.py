"""Window-width selection by spectral concentration.

A constant-width transform is scored per frame with a rescaled Renyi entropy
over a sliding time block:

    E(t) = 5 log2 I2 - 2 log2 I5,
    Ip = integral over b in [t - zeta, t + zeta], eta > 0 of |V(b, eta)|^p,

lower meaning more concentrated; the score is invariant under rescaling the
signal.  The global per-frame width minimizes E over a width grid; a
per-component width is then walked downward from it along a detected ridge
until the ridge location starts to move, which marks the onset of
interference from neighboring components.
"""

from dataclasses import dataclass

import numpy as np

from .core import WindowSpec, essential_half_width
from .errors import DegenerateWindowError, InvalidParameterError, UndefinedEntropyError
from .stft import (
    FrequencyGrid,
    SigmaTrack,
    _window_weights,
    adaptive_stft,
    frame_band,
    grid_for_sigma,
)
from .validation import check_positive

_ENTROPY_COEFF_SQUARE = 5.0
_ENTROPY_COEFF_FIFTH = 2.0


@dataclass(frozen=True)
class EntropyProfile:
    """Concentration score per (frame, candidate width)."""

    sigma_grid: np.ndarray
    entropy: np.ndarray
    sample_rate: float
    start_time: float = 0.0

    def __post_init__(self):
        grid = np.asarray(self.sigma_grid, dtype=float)
        ent = np.asarray(self.entropy, dtype=float)
        if grid.ndim != 1 or grid.size < 1 or (grid <= 0).any():
            raise InvalidParameterError("sigma grid must be a 1-D array of positive widths")
        if grid.size > 1 and (np.diff(grid) <= 0).any():
            raise InvalidParameterError("sigma grid must be strictly ascending")
        if ent.ndim != 2 or ent.shape[1] != grid.size:
            raise InvalidParameterError("entropy matrix must have one column per grid width")
        object.__setattr__(self, "sigma_grid", grid)
        object.__setattr__(self, "entropy", ent)
        object.__setattr__(self, "sample_rate", check_positive(self.sample_rate, "sample_rate"))

    @property
    def n_frames(self):
        return self.entropy.shape[0]

    def times(self):
        return self.start_time + np.arange(self.n_frames) / self.sample_rate

    def argmin_track(self):
        """Entropy-minimizing width per frame; ties resolve to the smaller width.

        Frames where no width has a defined score inherit the choice of the
        nearest frame that does.
        """
        ent = self.entropy
        valid = np.isfinite(ent).any(axis=1)
        if not valid.any():
            raise UndefinedEntropyError("entropy undefined on every frame (zero local energy)")
        idx = np.zeros(self.n_frames, dtype=int)
        rows = np.flatnonzero(valid)
        safe = np.where(np.isfinite(ent[rows]), ent[rows], np.inf)
        idx[rows] = np.argmin(safe, axis=1)  # first minimum = smallest sigma on ties
        missing = np.flatnonzero(~valid)
        if missing.size:
            pos = np.searchsorted(rows, missing)
            left = np.clip(pos - 1, 0, rows.size - 1)
            right = np.clip(pos, 0, rows.size - 1)
            nearer = np.where(
                np.abs(rows[right] - missing) < np.abs(missing - rows[left]), rows[right], rows[left]
            )
            idx[missing] = idx[nearer]
        return SigmaTrack(self.sigma_grid[idx])


def _positive_bin_slice(grid):
    k0 = int(np.searchsorted(grid.bins_hz, 0.0, side="right"))
    if k0 >= len(grid):
        raise InvalidParameterError("entropy needs bins with eta > 0")
    return k0


def _block_sums(per_frame, half_frames):
    # sliding sum over [n - h, n + h], truncated at the record edges
    n = per_frame.size
    cum = np.concatenate([[0.0], np.cumsum(per_frame)])
    lo = np.clip(np.arange(n) - half_frames, 0, n)
    hi = np.clip(np.arange(n) + half_frames + 1, 0, n)
    return cum[hi] - cum[lo]


def renyi_entropy(tf, frame, zeta):
    """Concentration score of one frame's sliding block; lower is sharper."""
    zeta = check_positive(zeta, "zeta")
    n = int(frame)
    if not 0 <= n < tf.n_frames:
        raise InvalidParameterError(f"frame {n} outside tf of {tf.n_frames} frames")
    k0 = _positive_bin_slice(tf.grid)
    h = int(round(zeta * tf.sample_rate))
    lo, hi = max(0, n - h), min(tf.n_frames, n + h + 1)
    mag = np.abs(tf.values[lo:hi, k0:])
    d_eta = tf.grid.spacing
    dt = 1.0 / tf.sample_rate
    i2 = float((mag**2).sum() * d_eta * dt)
    i5 = float((mag**5).sum() * d_eta * dt)
    if i2 <= 0.0 or i5 <= 0.0:
        raise UndefinedEntropyError("zero local energy; entropy undefined")
    return float(_ENTROPY_COEFF_SQUARE * np.log2(i2) - _ENTROPY_COEFF_FIFTH * np.log2(i5))


def entropy_profile(x, sigma_grid, zeta, grid=None, window=None):
    """Score every frame at every candidate width.

    Computes one constant-width transform per grid value; undefined scores
    (zero local energy) are stored as NaN.
    """
    window = window or WindowSpec()
    sigma_grid = np.asarray(sigma_grid, dtype=float)
    if sigma_grid.ndim != 1 or sigma_grid.size < 1 or (sigma_grid <= 0).any():
        raise InvalidParameterError("sigma grid must be a 1-D array of positive widths")
    if sigma_grid.size > 1 and (np.diff(sigma_grid) <= 0).any():
        raise InvalidParameterError("sigma grid must be strictly ascending")
    zeta = check_positive(zeta, "zeta")
    if grid is None:
        grid = grid_for_sigma(x.sample_rate, float(sigma_grid.max()), window)
    k0 = _positive_bin_slice(grid)
    d_eta = grid.spacing
    dt = x.dt
    h = int(round(zeta * x.sample_rate))
    ent = np.empty((len(x), sigma_grid.size))
    for j, sigma in enumerate(sigma_grid):
        tf = adaptive_stft(x, SigmaTrack.constant(sigma, len(x)), grid, window)
        mag = np.abs(tf.values[:, k0:])
        s2 = _block_sums((mag**2).sum(axis=1) * d_eta * dt, h)
        s5 = _block_sums((mag**5).sum(axis=1) * d_eta * dt, h)
        with np.errstate(divide="ignore", invalid="ignore"):
            col = _ENTROPY_COEFF_SQUARE * np.log2(s2) - _ENTROPY_COEFF_FIFTH * np.log2(s5)
        col[(s2 <= 0.0) | (s5 <= 0.0)] = np.nan
        ent[:, j] = col
    return EntropyProfile(sigma_grid, ent, x.sample_rate, x.start_time)


def select_global_sigma(x, sigma_grid, zeta, grid=None, window=None, profile=None):
    """Entropy-minimizing width per frame over the candidate grid."""
    if profile is None:
        profile = entropy_profile(x, sigma_grid, zeta, grid, window)
    return profile.argmin_track()


def refine_local_sigma(
    x,
    ridge,
    sigma_start,
    chirp_prelim,
    grid,
    sigma_min,
    delta_sigma,
    epsilon,
    window=None,
):
    """Walk each support frame's width downward until its ridge bin drifts.

    Starting from `sigma_start` (one value per support frame), repeatedly try
    sigma - delta_sigma: recompute the in-band magnitude argmax around the
    current ridge frequency (band half-width from the essential width at the
    candidate sigma and the preliminary chirp rate) and accept the decrement
    while the argmax moves by less than epsilon times that half-width.  Stops
    at sigma_min.  Returns the last accepted width per frame.
    """
    window = window or WindowSpec()
    if not isinstance(grid, FrequencyGrid):
        raise InvalidParameterError("grid must be a FrequencyGrid")
    sigma_min = check_positive(sigma_min, "sigma_min")
    delta_sigma = check_positive(delta_sigma, "delta_sigma")
    epsilon = check_positive(epsilon, "epsilon")
    n = len(ridge)
    start = np.asarray(getattr(sigma_start, "values", sigma_start), dtype=float)
    if start.shape != (n,) or (start <= 0).any():
        raise InvalidParameterError("sigma_start must hold one positive width per support frame")
    rates = np.asarray(getattr(chirp_prelim, "values", chirp_prelim), dtype=float)
    if rates.ndim == 0:
        rates = np.full(n, float(rates))
    if rates.shape != (n,):
        raise InvalidParameterError("chirp_prelim must hold one rate per support frame")
    k0 = _positive_bin_slice(grid)
    bins = grid.bins_hz
    out = start.copy()

    # The walk probes many narrow bands with the same integer offsets and the
    # same bin grid, so precompute exp(-2j pi m dt eta) once for every offset
    # the largest window can reach and for the bins any band can touch, then
    # evaluate each probe as a dot product with a view into that table.  Bands
    # that drift outside the precomputed columns fall back to frame_band.
    dt = x.dt
    samples = x.samples
    last = len(x) - 1
    half_cap = window.half_support_samples(float(start.max()), x.sample_rate)
    reach_lo = np.inf
    reach_hi = -np.inf
    for i in range(n):
        levels = max(0.0, np.floor((start[i] - sigma_min) / delta_sigma) + 1.0)
        lam_cap = max(
            essential_half_width(sigma_min, rates[i], window.tau0),
            essential_half_width(float(start[i]), rates[i], window.tau0),
        )
        reach = lam_cap * (1.0 + epsilon * levels)
        reach_lo = min(reach_lo, float(ridge.eta_hz[i]) - reach)
        reach_hi = max(reach_hi, float(ridge.eta_hz[i]) + reach)
    c0, c1 = grid.band_indices(reach_lo, reach_hi)
    offsets = np.arange(-half_cap, half_cap + 1)
    phase = np.exp(-2j * np.pi * np.outer(offsets * dt, bins[c0:c1]))
    weight_cache = {}

    for i in range(n):
        frame = ridge.start_frame + i
        sigma = float(start[i])
        eta = float(ridge.eta_hz[i])
        while True:
            cand = sigma - delta_sigma
            if cand < sigma_min:
                break
            lam = essential_half_width(cand, rates[i], window.tau0)
            lo, hi = grid.band_indices(eta - lam, eta + lam)
            lo = max(lo, k0)
            if hi <= lo:
                break
            half = window.half_support_samples(cand, x.sample_rate)
            if 2 * half + 1 < 3:
                break
            if lo < c0 or hi > c1:
                try:
                    band = frame_band(x, frame, cand, grid, lo, hi, window)
                except DegenerateWindowError:
                    break
            else:
                full = weight_cache.get(cand)
                if full is None:
                    m_full = np.arange(-half, half + 1)
                    full = _window_weights(m_full * dt, cand, dt)
                    weight_cache[cand] = full
                mlo, mhi = max(-half, -frame), min(half, last - frame)
                seg = samples[frame + mlo : frame + mhi + 1] * full[half + mlo : half + mhi + 1]
                band = seg @ phase[half_cap + mlo : half_cap + mhi + 1, lo - c0 : hi - c0]
            k = lo + int(np.argmax(np.abs(band)))
            eta_next = float(bins[k])
            if abs(eta_next - eta) >= epsilon * lam:
                break
            sigma, eta = cand, eta_next
        out[i] = sigma
    return SigmaTrack(out)
