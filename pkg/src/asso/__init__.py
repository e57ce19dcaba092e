"""Adaptive signal separation toolkit.

Separates a sampled record into oscillatory components with a short-time
Fourier transform whose Gaussian window width varies over time.  A spectral
concentration measure picks the width, ridge tracking follows each
component's instantaneous frequency, and a local linear-chirp model turns
ridge values back into time-domain samples.  `separate` runs the whole
pipeline; the other entry points expose the individual stages.
"""

__version__ = "0.1.0"

from .bench import (
    ComparisonReport,
    SyntheticCase,
    add_noise,
    compare_models,
    component_errors,
    gen_lfm,
    gen_three_component,
    match_to_truth,
    mse,
)
from .core import (
    AssoConfig,
    GroundTruthComponent,
    SampledSignal,
    WindowSpec,
    branch_sqrt,
    chirp_stft_closed_form,
    essential_half_width,
    m_factor,
    window_value,
)
from .errors import (
    AssoError,
    ConfigError,
    DegenerateWindowError,
    EmptyRidgeError,
    InsufficientDataError,
    InvalidParameterError,
    NoPeakError,
    SignalIOError,
    UndefinedEntropyError,
)
from .io import read_signal, read_signal_csv, read_signal_wav, write_signal_csv, write_tf_csv
from .pipeline import (
    PassDiagnostics,
    ResolvedParams,
    SeparationResult,
    resolve_params,
    separate,
    smooth_track,
)
from .recovery import (
    RecoveredComponent,
    chirp_correction,
    error_bound_sinusoidal,
    recover_chirp,
    recover_complex,
    recover_sinusoidal,
)
from .ridge import ChirpRateTrack, Ridge, detect_ridge, estimate_chirp_rate, global_peak
from .stft import (
    FrequencyGrid,
    SigmaTrack,
    TFRepresentation,
    adaptive_stft,
    asso_discrete,
    default_fft_length,
    extract_trend,
    frame_band,
    grid_for_sigma,
    reconstruct_real,
    set_fft_workers,
    stft_frame,
)
from .tuning import (
    EntropyProfile,
    entropy_profile,
    refine_local_sigma,
    renyi_entropy,
    select_global_sigma,
)


def __getattr__(name):
    # the scikit-learn adapter pulls in sklearn, so load it on first use
    if name == "AdaptiveSignalSeparator":
        from .estimator import AdaptiveSignalSeparator

        return AdaptiveSignalSeparator
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
