"""End-to-end separation of a sampled record into chirp-like components.

Greedy peeling loop.  Each pass scores candidate window widths on the current
residual, transforms it with the per-frame entropy-minimizing width, seeds a
ridge at the strongest time-frequency peak, tightens the width along the ridge
until the ridge bin starts to drift, re-transforms the ridge support with the
tightened widths, fits the local frequency slope, rebuilds the component with
the slope-corrected inversion, and subtracts it.  A slow moving average can be
removed up front and is reported separately.

Magnitude thresholds anchor to the first pass: the loop stops when the best
remaining peak falls under `gamma1_rel` times the first peak, and ridge tracing
stops under `gamma2_rel` times the first peak.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import AssoConfig, SampledSignal, WindowSpec, essential_half_width
from .errors import InvalidParameterError, NoPeakError, UndefinedEntropyError
from .recovery import RecoveredComponent, recover_chirp, recover_sinusoidal
from .ridge import ChirpRateTrack, Ridge, detect_ridge, estimate_chirp_rate
from .stft import (
    FrequencyGrid,
    SigmaTrack,
    adaptive_stft,
    default_fft_length,
    extract_trend,
)
from .tuning import entropy_profile, refine_local_sigma

log = logging.getLogger("asso.pipeline")


def smooth_track(values, window_len):
    """Centered moving average with edge truncation.

    Near the record edges the average runs over the in-range part of the
    window only, so constant tracks are preserved everywhere and affine
    tracks are preserved away from the edges.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise InvalidParameterError("track must be 1-D")
    window_len = int(window_len)
    if window_len < 1 or window_len % 2 == 0:
        raise InvalidParameterError("window_len must be a positive odd integer")
    if window_len == 1 or values.size <= 2:
        return values.copy()
    eff = min(window_len, values.size if values.size % 2 == 1 else values.size - 1)
    kernel = np.ones(eff)
    num = np.convolve(values, kernel, mode="same")
    den = np.convolve(np.ones_like(values), kernel, mode="same")
    return num / den


@dataclass(frozen=True)
class ResolvedParams:
    """Concrete numbers the separation actually ran with."""

    window: WindowSpec
    sigma_min: float
    sigma_max: float
    sigma_grid: np.ndarray
    delta_sigma: float
    zeta: float
    grid: FrequencyGrid
    trend_sigma: float
    smooth_len: int


def resolve_params(config, signal):
    """Fill every unset width, grid, and smoothing choice from the record.

    Defaults scale with the record: the width grid spans about a 16th of the
    record duration down to a 32nd (floored at a few sample periods), the
    entropy block covers several of the widest windows, and the frequency
    grid is the canonical FFT layout sized for the widest window.  The grid
    floor doubles as the stop for the per-ridge width walk, so it sits where
    slope-corrected recovery still balances neighbor leakage against
    curvature error on records with several sustained components.
    """
    if not isinstance(config, AssoConfig):
        raise InvalidParameterError("config must be an AssoConfig")
    if not isinstance(signal, SampledSignal):
        raise InvalidParameterError("signal must be a SampledSignal")
    fs = signal.sample_rate
    duration = signal.duration
    window = config.window()

    sigma_max = config.sigma_max if config.sigma_max is not None else max(duration / 16.0, 8.0 / fs)
    sigma_min = config.sigma_min if config.sigma_min is not None else max(duration / 32.0, 4.0 / fs)
    if sigma_min > sigma_max:
        sigma_min = sigma_max / 4.0
    if config.sigma_step is not None:
        sigma_grid = np.arange(sigma_min, sigma_max + 0.5 * config.sigma_step, config.sigma_step)
        if sigma_grid.size == 0:
            sigma_grid = np.array([sigma_min])
    elif sigma_min == sigma_max:
        sigma_grid = np.array([sigma_max])
    else:
        sigma_grid = np.geomspace(sigma_min, sigma_max, config.sigma_grid_size)

    if config.delta_sigma is not None:
        delta_sigma = config.delta_sigma
    elif sigma_grid.size > 1:
        delta_sigma = (sigma_max - sigma_min) / (sigma_grid.size - 1)
    else:
        delta_sigma = sigma_max / 16.0

    zeta = config.zeta if config.zeta is not None else 8.0 * sigma_max

    if config.freq_bins is not None:
        fft_len = int(config.freq_bins)
    else:
        fft_len = default_fft_length(sigma_max, fs, window)
    grid = FrequencyGrid.canonical(fs, fft_len)

    trend_sigma = config.trend_sigma if config.trend_sigma is not None else sigma_min

    smooth_len = config.smooth_len
    n = len(signal)
    if smooth_len > n:
        smooth_len = n if n % 2 == 1 else n - 1

    return ResolvedParams(
        window=window,
        sigma_min=float(sigma_min),
        sigma_max=float(sigma_max),
        sigma_grid=sigma_grid.astype(float),
        delta_sigma=float(delta_sigma),
        zeta=float(zeta),
        grid=grid,
        trend_sigma=float(trend_sigma),
        smooth_len=int(smooth_len),
    )


def fit_halfwidths(sigma_values, sample_rate, window, override=None):
    """Slope-fit window half-length per frame, in frames.

    Scales with the essential time support of the analysis window so the fit
    sees a stretch of ridge comparable to what produced each coefficient.
    """
    sigma_values = np.asarray(sigma_values, dtype=float)
    if override is not None:
        return np.full(sigma_values.shape, int(override), dtype=int)
    scale = np.sqrt(2.0 * abs(np.log(window.tau0)))
    return np.maximum(5, np.round(sigma_values * scale * sample_rate).astype(int))


def _lambda0_track(sigma_values, window, convention):
    scale = np.sqrt(2.0 * abs(np.log(window.tau0)))
    if convention == "frequency":
        return scale / (2.0 * np.pi * sigma_values)
    return 2.0 * np.pi * sigma_values * scale


@dataclass(frozen=True)
class PassDiagnostics:
    """Everything one peeling pass measured and produced."""

    pass_index: int
    seed: tuple
    peak_magnitude: float
    sigma_global: SigmaTrack
    sigma_smoothed: SigmaTrack
    sigma_refined_raw: SigmaTrack
    sigma_refined: SigmaTrack
    detection_ridge: Ridge
    ridge: Ridge
    chirp_rate_prelim: ChirpRateTrack
    chirp_rate: ChirpRateTrack
    chirp_samples: np.ndarray
    sinusoidal_samples: np.ndarray
    energy_before: float
    energy_after: float


@dataclass(frozen=True)
class SeparationResult:
    """Trend, peeled components, and what was left over."""

    signal: SampledSignal
    config: AssoConfig
    params: ResolvedParams
    trend: np.ndarray
    components: list
    residual: np.ndarray
    stopping_reason: str
    passes: list = field(default_factory=list)

    @property
    def n_components(self):
        return len(self.components)

    def component_matrix(self):
        """Components as rows, zero-extended to the record length."""
        n = len(self.signal)
        if not self.components:
            return np.zeros((0, n))
        return np.vstack([c.full_samples(n) for c in self.components])

    def reconstruct(self):
        """Trend plus components plus residual; matches the input record."""
        total = self.trend + self.residual
        for comp in self.components:
            total = total + comp.full_samples(len(self.signal))
        return total


def separate(x, config=None):
    """Peel components off a real record until no strong peak remains.

    Returns a SeparationResult whose `reconstruct()` reproduces the input to
    rounding error.  Stopping reasons: "below_gamma1" (best remaining peak
    under the anchored threshold), "no_peak" or "zero_residual" (nothing left
    to seed a ridge), "max_components" (pass budget exhausted).
    """
    config = config or AssoConfig()
    if not isinstance(x, SampledSignal):
        raise InvalidParameterError("x must be a SampledSignal")
    if x.is_complex:
        raise InvalidParameterError("separation expects a real-valued record")
    params = resolve_params(config, x)
    window = params.window
    fs = x.sample_rate
    n = len(x)

    residual = x.samples.astype(float).copy()
    if config.remove_trend:
        trend = extract_trend(x, params.trend_sigma, window)
        residual -= trend
    else:
        trend = np.zeros(n)

    gamma1_abs = None
    gamma2_abs = None
    components = []
    passes = []
    stopping_reason = "max_components"

    for pass_index in range(config.max_components):
        residual_sig = SampledSignal(residual, fs, x.start_time)
        try:
            profile = entropy_profile(residual_sig, params.sigma_grid, params.zeta, params.grid, window)
            sigma_global = profile.argmin_track()
        except UndefinedEntropyError:
            stopping_reason = "zero_residual"
            break
        sigma_r = SigmaTrack(smooth_track(sigma_global.values, params.smooth_len))
        tf = adaptive_stft(residual_sig, sigma_r, params.grid, window)

        try:
            seed = _seed_peak(tf, sigma_r.values, window)
        except NoPeakError:
            stopping_reason = "no_peak"
            break
        peak_magnitude = float(np.abs(tf.values[seed]))
        if gamma1_abs is None:
            gamma1_abs = config.gamma1_rel * peak_magnitude
            gamma2_abs = config.gamma2_rel * peak_magnitude
            log.info("anchored thresholds: gamma1=%.6g gamma2=%.6g", gamma1_abs, gamma2_abs)
        if peak_magnitude <= gamma1_abs:
            stopping_reason = "below_gamma1"
            log.info("pass %d: peak %.6g under threshold, stopping", pass_index, peak_magnitude)
            break

        lambda0 = _lambda0_track(sigma_r.values, window, config.lambda0_convention)
        ridge_det = detect_ridge(tf, seed, lambda0, gamma2_abs)
        rows = ridge_det.frames()
        sigma_on_support = sigma_r.values[rows]
        hw_det = fit_halfwidths(sigma_on_support, fs, window, config.fit_halfwidth)
        rate_prelim = estimate_chirp_rate(ridge_det, fs, hw_det)

        if config.refine_sigma:
            sigma_refined_raw = refine_local_sigma(
                residual_sig,
                ridge_det,
                sigma_on_support,
                rate_prelim,
                params.grid,
                params.sigma_min,
                params.delta_sigma,
                config.refine_epsilon,
                window,
            )
        else:
            sigma_refined_raw = SigmaTrack(sigma_on_support.copy())
        sigma_refined = SigmaTrack(smooth_track(sigma_refined_raw.values, params.smooth_len))

        start, stop = ridge_det.start_frame, ridge_det.stop_frame
        tf_p = adaptive_stft(residual_sig, sigma_refined, params.grid, window, frames=(start, stop))
        ridge_p = _relocalize(tf_p, ridge_det, sigma_refined, rate_prelim, window)

        hw_p = fit_halfwidths(sigma_refined.values, fs, window, config.fit_halfwidth)
        rate = estimate_chirp_rate(ridge_p, fs, hw_p)
        if config.smooth_chirp_rate:
            rate = ChirpRateTrack(rate.start_frame, smooth_track(rate.values, params.smooth_len))

        chirp_samples = recover_chirp(tf_p, ridge_p, rate)
        sinusoidal_samples = recover_sinusoidal(tf_p, ridge_p)
        chosen = chirp_samples if config.recovery_model == "chirp" else sinusoidal_samples
        component = RecoveredComponent(
            samples=chosen,
            ridge=ridge_p,
            chirp_track=rate,
            sigma_track=sigma_refined.values,
            model=config.recovery_model,
        )

        energy_before = float(np.linalg.norm(residual[start:stop]))
        residual[start:stop] -= chosen
        energy_after = float(np.linalg.norm(residual[start:stop]))
        log.info(
            "pass %d: peak %.4g at frame %d, support [%d, %d), energy %.4g -> %.4g",
            pass_index, peak_magnitude, ridge_det.seed_frame, start, stop,
            energy_before, energy_after,
        )

        components.append(component)
        passes.append(
            PassDiagnostics(
                pass_index=pass_index,
                seed=seed,
                peak_magnitude=peak_magnitude,
                sigma_global=sigma_global,
                sigma_smoothed=sigma_r,
                sigma_refined_raw=sigma_refined_raw,
                sigma_refined=sigma_refined,
                detection_ridge=ridge_det,
                ridge=ridge_p,
                chirp_rate_prelim=rate_prelim,
                chirp_rate=rate,
                chirp_samples=chirp_samples,
                sinusoidal_samples=sinusoidal_samples,
                energy_before=energy_before,
                energy_after=energy_after,
            )
        )

    return SeparationResult(
        signal=x,
        config=config,
        params=params,
        trend=trend,
        components=components,
        residual=residual,
        stopping_reason=stopping_reason,
        passes=passes,
    )


def _seed_peak(tf, sigma_values, window):
    """Strongest coefficient outside each frame's DC guard band.

    Bins within one essential half-width of zero frequency are excluded from
    seeding: with zero extension the slow trend leaks into those bins near the
    record edges, and a "component" seeded there would only re-extract trend
    remnants.  Ordinary components ride well above the guard.
    """
    bins = tf.grid.bins_hz
    guard = _lambda0_track(np.asarray(sigma_values, dtype=float), window, "frequency")
    mag = np.abs(tf.values)
    masked = np.where(bins[None, :] > guard[:, None], mag, 0.0)
    if not masked.any():
        raise NoPeakError("no energy above the DC guard band")
    flat = int(np.argmax(masked))
    return np.unravel_index(flat, masked.shape)


def _relocalize(tf_p, ridge_det, sigma_refined, rate_prelim, window):
    """Re-seek the per-frame magnitude argmax around the detected ridge.

    The support is kept fixed; each frame's search band is the essential
    half-width at the refined width and preliminary rate, centered on the
    detected ridge frequency.
    """
    grid = tf_p.grid
    bins = grid.bins_hz
    k0 = int(np.searchsorted(bins, 0.0, side="right"))
    n = len(ridge_det)
    bin_indices = np.empty(n, dtype=int)
    for i in range(n):
        lam = essential_half_width(sigma_refined.values[i], rate_prelim.values[i], window.tau0)
        eta = ridge_det.eta_hz[i]
        lo, hi = grid.band_indices(eta - lam, eta + lam)
        lo = max(lo, k0)
        if hi <= lo:
            bin_indices[i] = ridge_det.bin_indices[i]
        else:
            bin_indices[i] = lo + int(np.argmax(np.abs(tf_p.values[i, lo:hi])))
    return Ridge(
        start_frame=ridge_det.start_frame,
        bin_indices=bin_indices,
        eta_hz=bins[bin_indices],
        magnitude=np.abs(tf_p.values[np.arange(n), bin_indices]),
        seed_frame=ridge_det.seed_frame,
    )
