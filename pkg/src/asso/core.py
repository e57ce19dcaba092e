"""Core numerical primitives and shared types.

The analysis window is the unit-integral Gaussian

    g_sigma(t) = (1 / sigma) g(t / sigma),   g(t) = exp(-t^2 / 2) / sqrt(2 pi),

and every frequency-domain quantity below refers to the windowed transform

    V(t, eta) = integral x(t + tau) g_sigma(tau) exp(-2j pi eta tau) dtau.

For a linear chirp x(t) = A cos(2 pi (c t + r t^2 / 2)) the transform has a
closed form (`chirp_stft_closed_form`) whose envelope `m_factor` concentrates
around the instantaneous frequency c + r t with essential half-width
`essential_half_width`.  Those three functions, plus the square-root branch
used by the chirp amplitude correction, are the primitives everything else
builds on.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError
from .validation import (
    check_choice,
    check_finite,
    check_in_open_interval,
    check_odd_length,
    check_positive,
    check_signal_array,
)

SQRT_2PI = float(np.sqrt(2.0 * np.pi))


def _scalar_or_array(out):
    return float(out) if np.ndim(out) == 0 else out


def _complex_scalar_or_array(out):
    return complex(out) if np.ndim(out) == 0 else out


def window_value(t, sigma):
    """Evaluate the unit-integral Gaussian window (1/sigma) g(t/sigma).

    Vectorized over `t`; `sigma` is a positive scalar in seconds.
    """
    sigma = check_positive(sigma, "sigma")
    u = np.asarray(t, dtype=float) / sigma
    return _scalar_or_array(np.exp(-0.5 * u * u) / (sigma * SQRT_2PI))


def branch_sqrt(z):
    """Square root taken on the branch with positive real part.

    Defined only for Re(z) > 0, where the principal root already lies in the
    same (open) half-plane quadrant as z; we keep that root so the chirp
    amplitude correction varies continuously with the chirp rate through r=0.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0.0):
        raise InvalidParameterError("branch_sqrt requires Re(z) > 0")
    return _complex_scalar_or_array(np.sqrt(z))


def m_factor(xi, sigma, r):
    """Spectral envelope exp(-2 pi^2 sigma^2 xi^2 / (1 - 2j pi r sigma^2)).

    `xi` is the offset (Hz) from the instantaneous frequency, `r` the chirp
    rate in Hz/s.  m_factor(0) == 1 and |m_factor| decays as a Gaussian in xi.
    """
    sigma = check_positive(sigma, "sigma")
    r = check_finite(r, "r")
    xi = np.asarray(xi, dtype=float)
    denom = 1.0 - 2j * np.pi * r * sigma * sigma
    return _complex_scalar_or_array(np.exp(-(2.0 * np.pi**2 * sigma**2 / denom) * xi * xi))


def essential_half_width(sigma, r, tau0):
    """Half-width (Hz) of the band where |m_factor| stays above tau0.

    Equals sqrt(2 |ln tau0|) * sqrt(1/(2 pi sigma)^2 + (r sigma)^2).  For
    fixed r != 0 it is minimized at sigma = 1 / sqrt(2 pi |r|).
    """
    sigma = check_positive(sigma, "sigma")
    r = check_finite(r, "r")
    tau0 = check_in_open_interval(tau0, 0.0, 1.0, "tau0")
    return float(np.sqrt(2.0 * abs(np.log(tau0))) * np.hypot(1.0 / (2.0 * np.pi * sigma), r * sigma))


def chirp_stft_closed_form(t, eta, amplitude, base_freq, chirp_rate, sigma):
    """Windowed transform of A cos(2 pi (c t + r t^2/2)), positive-frequency term.

    Returns
        A exp(2j pi (c t + r t^2/2)) / (2 branch_sqrt(1 - 2j pi sigma^2 r))
          * m_factor(eta - (c + r t), sigma, r)

    which neglects the negative-frequency image; the neglected term is below
    |m_factor(eta + c + r t)| and is vanishingly small whenever the window
    resolves the chirp.  Broadcasts over `t` and `eta`.
    """
    sigma = check_positive(sigma, "sigma")
    r = check_finite(chirp_rate, "chirp_rate")
    c = check_finite(base_freq, "base_freq")
    amplitude = check_finite(amplitude, "amplitude")
    t = np.asarray(t, dtype=float)
    eta = np.asarray(eta, dtype=float)
    phase = np.exp(2j * np.pi * (c * t + 0.5 * r * t * t))
    root = branch_sqrt(1.0 - 2j * np.pi * sigma * sigma * r)
    env = m_factor(eta - (c + r * t), sigma, r)
    return _complex_scalar_or_array(amplitude * phase / (2.0 * root) * env)


@dataclass(frozen=True)
class SampledSignal:
    """A uniformly sampled signal: samples, sample rate (Hz), start time (s)."""

    samples: np.ndarray
    sample_rate: float
    start_time: float = 0.0

    def __post_init__(self):
        arr = check_signal_array(self.samples)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", check_positive(self.sample_rate, "sample_rate"))
        object.__setattr__(self, "start_time", check_finite(self.start_time, "start_time"))

    def __len__(self):
        return self.samples.size

    @property
    def dt(self):
        return 1.0 / self.sample_rate

    @property
    def duration(self):
        return self.samples.size / self.sample_rate

    @property
    def is_complex(self):
        return np.iscomplexobj(self.samples)

    def times(self):
        return self.start_time + np.arange(self.samples.size) / self.sample_rate

    def with_samples(self, samples):
        return SampledSignal(samples, self.sample_rate, self.start_time)


@dataclass(frozen=True)
class GroundTruthComponent:
    """Analytic description of one oscillatory component A(t) cos(2 pi phi(t)).

    `amplitude`, `phase`, `if_hz` and `chirp_rate` are vectorized callables of
    time returning A, phi, phi' and phi'' respectively.
    """

    amplitude: object
    phase: object
    if_hz: object
    chirp_rate: object
    label: str = ""

    def sample(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.amplitude(t), dtype=float) * np.cos(2.0 * np.pi * np.asarray(self.phase(t), dtype=float))


@dataclass(frozen=True)
class WindowSpec:
    """Gaussian window conventions: relative level tau0 and truncation radius.

    tau0 in (0, 1) sets the 'essential support' level used for band widths;
    the window is truncated at truncation_radius * sigma (default 5 sigma,
    where the Gaussian is below 4e-6 of its peak).
    """

    tau0: float = 0.1
    truncation_radius: float = 5.0

    def __post_init__(self):
        object.__setattr__(self, "tau0", check_in_open_interval(self.tau0, 0.0, 1.0, "tau0"))
        object.__setattr__(self, "truncation_radius", check_positive(self.truncation_radius, "truncation_radius"))

    def half_support_samples(self, sigma, sample_rate):
        """Number of samples on each side of the center within the truncation radius."""
        return int(np.floor(self.truncation_radius * sigma * sample_rate + 1e-12))

    def half_width_hz(self, sigma, r=0.0):
        return essential_half_width(sigma, r, self.tau0)


_LAMBDA0_CONVENTIONS = {"frequency", "verbatim"}
_RECOVERY_MODELS = {"chirp", "sinusoidal"}


@dataclass(frozen=True)
class AssoConfig:
    """Tunable parameters of the separation pipeline.

    Every field has a usable default; fields left at None are resolved against
    the input signal at run time (see pipeline.resolve_params): the sigma
    search range from the record length, the frequency-bin count from the
    largest window, zeta as 8x the largest grid sigma, the refinement
    decrement as one grid step, and the trend window as the smallest grid
    sigma.
    """

    tau0: float = 0.1
    truncation_radius: float = 5.0
    gamma1_rel: float = 0.3
    gamma2_rel: float = 0.1
    sigma_min: float | None = None
    sigma_max: float | None = None
    sigma_step: float | None = None
    sigma_grid_size: int = 24
    delta_sigma: float | None = None
    zeta: float | None = None
    refine_epsilon: float = 0.05
    smooth_len: int = 33
    max_components: int = 8
    freq_bins: int | None = None
    fit_halfwidth: int | None = None
    remove_trend: bool = True
    trend_sigma: float | None = None
    lambda0_convention: str = "frequency"
    recovery_model: str = "chirp"
    smooth_chirp_rate: bool = True
    refine_sigma: bool = True

    def __post_init__(self):
        check_in_open_interval(self.tau0, 0.0, 1.0, "tau0")
        check_positive(self.truncation_radius, "truncation_radius")
        check_positive(self.gamma1_rel, "gamma1_rel")
        check_positive(self.gamma2_rel, "gamma2_rel")
        if not self.gamma2_rel < self.gamma1_rel:
            raise InvalidParameterError(
                f"gamma2_rel ({self.gamma2_rel}) must be smaller than gamma1_rel ({self.gamma1_rel})"
            )
        for name in ("sigma_min", "sigma_max", "sigma_step", "delta_sigma", "zeta", "trend_sigma"):
            value = getattr(self, name)
            if value is not None:
                check_positive(value, name)
        if self.sigma_min is not None and self.sigma_max is not None and self.sigma_min > self.sigma_max:
            raise InvalidParameterError("sigma_min must not exceed sigma_max")
        if int(self.sigma_grid_size) < 1:
            raise InvalidParameterError("sigma_grid_size must be >= 1")
        check_in_open_interval(self.refine_epsilon, 0.0, 0.1, "refine_epsilon")
        check_odd_length(self.smooth_len, "smooth_len")
        if int(self.max_components) < 1:
            raise InvalidParameterError("max_components must be >= 1")
        if self.freq_bins is not None and int(self.freq_bins) < 9:
            raise InvalidParameterError("freq_bins must be >= 9")
        if self.fit_halfwidth is not None and int(self.fit_halfwidth) < 1:
            raise InvalidParameterError("fit_halfwidth must be >= 1")
        check_choice(self.lambda0_convention, _LAMBDA0_CONVENTIONS, "lambda0_convention")
        check_choice(self.recovery_model, _RECOVERY_MODELS, "recovery_model")

    def window(self):
        return WindowSpec(self.tau0, self.truncation_radius)

    def replace(self, **updates):
        return replace(self, **updates)
