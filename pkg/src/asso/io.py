"""Reading and writing sampled records and analysis products.

CSV is the interchange format.  Every writer emits a header row and prints
floats with 17 significant digits so reading the file back reproduces the
exact double.  Mono PCM WAV files (16- or 24-bit) are accepted as signal
input for audio-style records; the sample rate then comes from the header.
"""

import wave

import numpy as np

from .core import SampledSignal
from .errors import SignalIOError

_FLOAT_FMT = "%.17g"
_TIME_JITTER_REL = 1e-6


def write_table(path, header, columns):
    """Write equal-length numeric columns as CSV with a header row."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    table = np.column_stack(cols)
    np.savetxt(path, table, fmt=_FLOAT_FMT, delimiter=",", header=",".join(header), comments="")


def read_signal_csv(path, sample_rate=None):
    """Read a two-column time,value CSV into a SampledSignal.

    The sample rate is taken from `sample_rate` when given, otherwise from
    the spacing of the time column; either way the time column must be a
    uniform grid.
    """
    with open(path, "r", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SignalIOError(f"{path}: empty file")
    header = [part.strip().lower() for part in lines[0].split(",")]
    if header != ["time", "value"]:
        raise SignalIOError(f"{path}: expected header 'time,value', got {lines[0]!r}")
    rows = [line for line in lines[1:] if line.strip()]
    if len(rows) < 2:
        raise SignalIOError(f"{path}: need at least 2 samples")
    try:
        data = np.array([[float(part) for part in line.split(",")] for line in rows])
    except ValueError as exc:
        raise SignalIOError(f"{path}: non-numeric row ({exc})") from None
    if data.shape[1] != 2:
        raise SignalIOError(f"{path}: expected 2 columns, got {data.shape[1]}")
    times, values = data[:, 0], data[:, 1]
    steps = np.diff(times)
    if sample_rate is None:
        dt = float(np.median(steps))
        if dt <= 0:
            raise SignalIOError(f"{path}: time column must increase")
        sample_rate = 1.0 / dt
    dt = 1.0 / float(sample_rate)
    if np.max(np.abs(steps - dt)) > _TIME_JITTER_REL * dt:
        raise SignalIOError(f"{path}: time column is not a uniform grid at {sample_rate} Hz")
    return SampledSignal(values, float(sample_rate), float(times[0]))


def read_signal_wav(path):
    """Read a mono 16- or 24-bit PCM WAV file; sample rate from the header."""
    try:
        with wave.open(str(path), "rb") as fh:
            n_channels = fh.getnchannels()
            width = fh.getsampwidth()
            comp = fh.getcomptype()
            rate = fh.getframerate()
            n_frames = fh.getnframes()
            raw = fh.readframes(n_frames)
    except wave.Error as exc:
        raise SignalIOError(f"{path}: not a readable WAV file ({exc})") from None
    if comp != "NONE":
        raise SignalIOError(f"{path}: compressed WAV ({comp}) is not supported")
    if n_channels != 1:
        raise SignalIOError(f"{path}: only mono WAV is supported, got {n_channels} channels")
    if width == 2:
        values = np.frombuffer(raw, dtype="<i2").astype(float) / 2.0**15
    elif width == 3:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        ints = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
        values = ints.astype(float) / 2.0**23
    else:
        raise SignalIOError(f"{path}: only 16- or 24-bit PCM is supported, got {8 * width}-bit")
    if values.size < 2:
        raise SignalIOError(f"{path}: need at least 2 samples")
    return SampledSignal(values, float(rate))


def read_signal(path, sample_rate=None):
    """Read a signal file, dispatching on the .wav / .csv suffix."""
    if str(path).lower().endswith(".wav"):
        if sample_rate is not None:
            raise SignalIOError("the sample rate of a WAV file comes from its header")
        return read_signal_wav(path)
    return read_signal_csv(path, sample_rate)


def write_signal_csv(path, x):
    """Write a real record as a time,value CSV."""
    if x.is_complex:
        raise SignalIOError("complex records have no two-column CSV form")
    write_table(path, ("time", "value"), (x.times(), x.samples))


def write_series_csv(path, times, values, value_name="value"):
    """Write one real series against time."""
    write_table(path, ("time", value_name), (times, values))


def write_tf_csv(path, tf):
    """Write a time-frequency matrix as long-form rows time,freq,re,im,abs."""
    times = np.repeat(tf.times(), len(tf.grid))
    freqs = np.tile(tf.grid.bins_hz, tf.n_frames)
    flat = tf.values.ravel()
    write_table(path, ("time", "freq", "re", "im", "abs"), (times, freqs, flat.real, flat.imag, np.abs(flat)))


def write_ridge_csv(path, ridge, sample_rate, chirp_values=None, start_time=0.0):
    """Write a ridge as rows time,eta,magnitude,r."""
    times = start_time + ridge.frames() / float(sample_rate)
    if chirp_values is None:
        chirp_values = np.zeros(len(ridge))
    chirp_values = np.asarray(chirp_values, dtype=float)
    if chirp_values.shape != (len(ridge),):
        raise SignalIOError("chirp_values must hold one rate per ridge frame")
    write_table(path, ("time", "eta", "magnitude", "r"), (times, ridge.eta_hz, ridge.magnitude, chirp_values))


def write_entropy_csv(path, profile):
    """Write an entropy profile as long-form rows time,sigma,entropy."""
    times = np.repeat(profile.times(), profile.sigma_grid.size)
    sigmas = np.tile(profile.sigma_grid, profile.n_frames)
    write_table(path, ("time", "sigma", "entropy"), (times, sigmas, profile.entropy.ravel()))


def write_error_csv(path, times, recovered, truth):
    """Write the pointwise difference recovered - truth against time."""
    recovered = np.asarray(recovered, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if recovered.shape != truth.shape:
        raise SignalIOError("recovered and truth series must have the same length")
    write_table(path, ("time", "error"), (times, recovered - truth))
