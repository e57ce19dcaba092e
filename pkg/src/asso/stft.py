"""Windowed transforms with a per-frame Gaussian window width.

Frames advance one sample at a time, so the transform of an N-sample record
has N frames (optionally restricted to a frame range).  Samples outside the
record are treated as zero.  Frequencies are physical (Hz); the frame at
sample n evaluates

    V[n, k] = dt * sum_m x[n + m] g_sigma(m dt) exp(-2j pi eta_k m dt)

with m running over the truncated window support |m dt| <= radius * sigma.
When the frequency grid is the canonical FFT grid (eta_k = k fs / M) the sum
is evaluated with an FFT; otherwise by direct summation.  Both routes are
exposed so they can be checked against each other.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.special

from .core import SQRT_2PI, SampledSignal, WindowSpec, window_value
from .errors import DegenerateWindowError, InvalidParameterError
from .validation import check_positive

_fft_workers = None


def set_fft_workers(n):
    """Cap the worker count used by batched FFTs (None restores the default)."""
    global _fft_workers
    _fft_workers = None if n is None else int(n)


@dataclass(frozen=True)
class FrequencyGrid:
    """Ascending, uniformly spaced analysis frequencies in Hz."""

    bins_hz: np.ndarray

    def __post_init__(self):
        bins = np.asarray(self.bins_hz, dtype=float)
        if bins.ndim != 1 or bins.size < 1:
            raise InvalidParameterError("frequency grid must be a nonempty 1-D array")
        if not np.isfinite(bins).all():
            raise InvalidParameterError("frequency grid contains non-finite values")
        if bins.size > 1:
            d = np.diff(bins)
            if (d <= 0).any():
                raise InvalidParameterError("frequency grid must be strictly ascending")
            mean = d.mean()
            if np.abs(d - mean).max() > 1e-12 * max(abs(bins[-1]), abs(bins[0]), mean):
                raise InvalidParameterError("frequency grid must be uniformly spaced")
        object.__setattr__(self, "bins_hz", bins)

    def __len__(self):
        return self.bins_hz.size

    @property
    def spacing(self):
        if self.bins_hz.size < 2:
            raise InvalidParameterError("spacing undefined for a single-bin grid")
        return float((self.bins_hz[-1] - self.bins_hz[0]) / (self.bins_hz.size - 1))

    def fft_length(self, sample_rate):
        """FFT length M such that the grid is the first bins of k*fs/M, else None."""
        if self.bins_hz.size < 2:
            return None
        if abs(self.bins_hz[0]) > 1e-9 * self.spacing:
            return None
        ratio = sample_rate / self.spacing
        m = int(round(ratio))
        if m < self.bins_hz.size or abs(ratio - m) > 1e-6:
            return None
        return m

    def band_indices(self, lo_hz, hi_hz):
        """Index range [i0, i1) of bins falling inside [lo_hz, hi_hz]."""
        i0 = int(np.searchsorted(self.bins_hz, lo_hz, side="left"))
        i1 = int(np.searchsorted(self.bins_hz, hi_hz, side="right"))
        return i0, i1

    @classmethod
    def canonical(cls, sample_rate, fft_length):
        """Nonnegative half of the length-M FFT grid: k * fs / M, k = 0..M//2."""
        sample_rate = check_positive(sample_rate, "sample_rate")
        m = int(fft_length)
        if m < 2:
            raise InvalidParameterError("fft_length must be >= 2")
        return cls(np.arange(m // 2 + 1) * (sample_rate / m))


def default_fft_length(sigma, sample_rate, window=None):
    """Power-of-two FFT length >= 4x the truncated window support at `sigma`."""
    window = window or WindowSpec()
    support = 2 * window.half_support_samples(sigma, sample_rate) + 1
    return int(2 ** np.ceil(np.log2(max(4 * support, 16))))


def grid_for_sigma(sample_rate, sigma, window=None):
    """Canonical grid sized for the largest window width in play."""
    return FrequencyGrid.canonical(sample_rate, default_fft_length(sigma, sample_rate, window))


@dataclass(frozen=True)
class SigmaTrack:
    """Window width per frame, in seconds."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise InvalidParameterError("sigma track must be a nonempty 1-D array")
        if not np.isfinite(vals).all() or (vals <= 0).any():
            raise InvalidParameterError("sigma track values must be positive and finite")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    @classmethod
    def constant(cls, sigma, n_frames):
        return cls(np.full(int(n_frames), check_positive(sigma, "sigma")))


@dataclass(frozen=True)
class TFRepresentation:
    """Complex time-frequency matrix, one row per frame, one column per bin."""

    values: np.ndarray
    grid: FrequencyGrid
    sigma_track: SigmaTrack
    sample_rate: float
    start_time: float = 0.0
    frame_offset: int = 0

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 2:
            raise InvalidParameterError("tf values must be a 2-D array")
        if vals.shape != (len(self.sigma_track), len(self.grid)):
            raise InvalidParameterError(
                f"tf shape {vals.shape} does not match (frames={len(self.sigma_track)}, bins={len(self.grid)})"
            )
        object.__setattr__(self, "values", vals.astype(np.complex128, copy=False))
        object.__setattr__(self, "sample_rate", check_positive(self.sample_rate, "sample_rate"))
        object.__setattr__(self, "frame_offset", int(self.frame_offset))

    @property
    def n_frames(self):
        return self.values.shape[0]

    def magnitude(self):
        return np.abs(self.values)

    def times(self):
        return self.start_time + (self.frame_offset + np.arange(self.n_frames)) / self.sample_rate


def _window_weights(offsets_s, sigma, dt):
    return np.exp(-0.5 * (offsets_s / sigma) ** 2) / (sigma * SQRT_2PI) * dt


def _check_support(half, what="window"):
    if 2 * half + 1 < 3:
        raise DegenerateWindowError(
            f"{what} covers fewer than 3 samples; increase sigma or the sample rate"
        )


def _resolve_method(method, fft_len, needed):
    if method not in ("auto", "fft", "direct"):
        raise InvalidParameterError(f"method must be 'auto', 'fft' or 'direct', got {method!r}")
    fft_ok = fft_len is not None and fft_len >= needed
    if method == "fft" and not fft_ok:
        raise InvalidParameterError("FFT path requires a canonical grid at least as long as the window support")
    return "fft" if (fft_ok and method != "direct") else "direct"


def stft_frame(x, frame, sigma, grid, window=None, method="auto"):
    """Transform of one frame; reference implementation for the batched path."""
    window = window or WindowSpec()
    n = int(frame)
    if not 0 <= n < len(x):
        raise InvalidParameterError(f"frame {n} outside record of {len(x)} samples")
    sigma = check_positive(sigma, "sigma")
    half = window.half_support_samples(sigma, x.sample_rate)
    _check_support(half)
    dt = x.dt
    lo, hi = max(-half, -n), min(half, len(x) - 1 - n)
    m = np.arange(lo, hi + 1)
    seg = x.samples[n + lo : n + hi + 1] * _window_weights(m * dt, sigma, dt)
    use = _resolve_method(method, grid.fft_length(x.sample_rate), 2 * half + 1)
    if use == "fft":
        fft_len = grid.fft_length(x.sample_rate)
        buf = np.zeros(fft_len, dtype=np.complex128 if np.iscomplexobj(seg) else np.float64)
        buf[m % fft_len] = seg
        return scipy.fft.fft(buf, workers=_fft_workers)[: len(grid)]
    phase = np.exp(-2j * np.pi * np.outer(m * dt, grid.bins_hz))
    return seg @ phase


def adaptive_stft(x, sigma_track, grid, window=None, frames=None, method="auto"):
    """Batched transform with a per-frame window width.

    `sigma_track` must hold one width per computed frame.  `frames` restricts
    the computation to the half-open frame range (start, stop); by default
    every sample of the record is a frame center.
    """
    window = window or WindowSpec()
    if not isinstance(sigma_track, SigmaTrack):
        sigma_track = SigmaTrack(np.asarray(sigma_track, dtype=float))
    if frames is None:
        start, stop = 0, len(x)
    else:
        start, stop = int(frames[0]), int(frames[1])
        if not (0 <= start < stop <= len(x)):
            raise InvalidParameterError(f"frame range {frames} outside record of {len(x)} samples")
    n_frames = stop - start
    if len(sigma_track) != n_frames:
        raise InvalidParameterError(
            f"sigma track has {len(sigma_track)} values for {n_frames} frames"
        )
    fs, dt = x.sample_rate, x.dt
    sig = sigma_track.values
    halves = np.floor(window.truncation_radius * sig * fs + 1e-12).astype(int)
    _check_support(int(halves.min()))
    half_max = int(halves.max())
    support = 2 * half_max + 1

    padded = np.zeros(len(x) + 2 * half_max, dtype=x.samples.dtype)
    padded[half_max : half_max + len(x)] = x.samples
    segments = np.lib.stride_tricks.sliding_window_view(padded, support)[start:stop]

    offsets = np.arange(-half_max, half_max + 1)
    weights = _window_weights(offsets[None, :] * dt, sig[:, None], dt)
    weights[np.abs(offsets)[None, :] > halves[:, None]] = 0.0
    prod = segments * weights

    use = _resolve_method(method, grid.fft_length(fs), support)
    if use == "fft":
        fft_len = grid.fft_length(fs)
        buf = np.zeros((n_frames, fft_len), dtype=prod.dtype if np.iscomplexobj(prod) else np.float64)
        buf[:, : half_max + 1] = prod[:, half_max:]
        buf[:, fft_len - half_max :] = prod[:, :half_max]
        values = scipy.fft.fft(buf, axis=1, workers=_fft_workers)[:, : len(grid)]
    else:
        phase = np.exp(-2j * np.pi * dt * np.outer(offsets, grid.bins_hz))
        values = prod.astype(np.complex128) @ phase
    return TFRepresentation(values, grid, sigma_track, fs, x.start_time, frame_offset=start)


def frame_band(x, frame, sigma, grid, bin_start, bin_stop, window=None):
    """Direct evaluation of one frame on a contiguous slice of grid bins.

    Cheap helper for per-frame searches over a narrow band; equivalent to
    stft_frame(...)[bin_start:bin_stop].
    """
    window = window or WindowSpec()
    n = int(frame)
    sigma = check_positive(sigma, "sigma")
    half = window.half_support_samples(sigma, x.sample_rate)
    _check_support(half)
    dt = x.dt
    lo, hi = max(-half, -n), min(half, len(x) - 1 - n)
    m = np.arange(lo, hi + 1)
    seg = x.samples[n + lo : n + hi + 1] * _window_weights(m * dt, sigma, dt)
    phase = np.exp(-2j * np.pi * np.outer(m * dt, grid.bins_hz[bin_start:bin_stop]))
    return seg @ phase


def asso_discrete(x, frame, a, delta, eta, window=None):
    """Discretized scaled-window operator at one frame and one frequency.

    Evaluates (1/h~_a) sum_n x(t - n delta) h(n / a) exp(2j pi delta n eta)
    with h the truncated Gaussian renormalized to unit integral and
    h~_a = sum_n h(n / a).  Approximates the frame transform with
    sigma = delta * a; `delta` must be an integer multiple of the sample
    spacing so x can be read off the sample grid.
    """
    window = window or WindowSpec()
    a = check_positive(a, "a")
    delta = check_positive(delta, "delta")
    n0 = int(frame)
    if not 0 <= n0 < len(x):
        raise InvalidParameterError(f"frame {n0} outside record of {len(x)} samples")
    stride_f = delta * x.sample_rate
    stride = int(round(stride_f))
    if stride < 1 or abs(stride_f - stride) > 1e-6:
        raise InvalidParameterError("delta must be a positive integer multiple of the sample spacing")
    radius = window.truncation_radius
    half = int(np.floor(radius * a + 1e-12))
    _check_support(half)
    n = np.arange(-half, half + 1)
    h = np.exp(-0.5 * (n / a) ** 2) / SQRT_2PI
    h /= scipy.special.erf(radius / np.sqrt(2.0))
    h_tilde = h.sum()
    idx = n0 - n * stride
    valid = (idx >= 0) & (idx < len(x))
    samples = np.where(valid, x.samples[np.clip(idx, 0, len(x) - 1)], 0.0)
    return complex(np.sum(samples * h * np.exp(2j * np.pi * delta * n * float(eta))) / h_tilde)


def reconstruct_real(tf, window=None):
    """Invert a real-signal transform by integrating each frame over frequency.

    Uses x[n] = (2 / g_sigma_n(0)) Re{ integral_0^inf V[n, eta] d eta } with the
    boundary bins (0 and Nyquist) at half weight.  Exact (to rounding) on the
    canonical half grid; a plain trapezoid approximation on any other grid.
    """
    bins = tf.grid.bins_hz
    if len(bins) < 2:
        raise InvalidParameterError("reconstruction needs at least two frequency bins")
    d_eta = tf.grid.spacing
    weights = np.ones(len(bins))
    fft_len = tf.grid.fft_length(tf.sample_rate)
    if fft_len is not None and len(bins) == fft_len // 2 + 1:
        weights[0] = 0.5
        if fft_len % 2 == 0:
            weights[-1] = 0.5
    else:
        weights[0] = 0.5
        weights[-1] = 0.5
    g0 = window_value(0.0, 1.0) / tf.sigma_track.values  # g_sigma(0) = g(0)/sigma
    return 2.0 * (tf.values @ weights).real * d_eta / g0


def extract_trend(x, sigma, window=None):
    """Low-frequency trend: the real part of the transform along eta = 0.

    Amounts to a Gaussian-weighted moving average (unit-integral weights,
    zero extension beyond the record ends).
    """
    window = window or WindowSpec()
    sigma = check_positive(sigma, "sigma")
    half = window.half_support_samples(sigma, x.sample_rate)
    _check_support(half, "trend window")
    m = np.arange(-half, half + 1)
    w = _window_weights(m * x.dt, sigma, x.dt)
    return np.real(np.convolve(x.samples, w, mode="full")[half : half + len(x)])
