"""Command-line front end: synthesize, transform, separate, benchmark.

Subcommands:

  synth     write a synthetic benchmark record (optionally noisy) plus its
            per-component ground truth
  stft      compute a time-frequency representation of a record with a fixed
            window width or an entropy-selected width track
  separate  run the full separation pipeline and write one CSV per product
            plus a JSON manifest
  bench     score the linear-chirp and sinusoidal recovery formulas over an
            SNR/seed grid

Exit codes: 0 success, 2 usage or invalid parameter, 3 input/output failure,
4 malformed configuration, 5 numeric degeneracy (window too narrow, no
usable peak, undefined entropy, or too little data).  The ASSO_LOG
environment variable sets the logging level; CSV outputs print floats with
17 significant digits and identical invocations produce byte-identical
CSVs.
"""

import argparse
import dataclasses
import json
import logging
import os
import sys
import time

from . import __version__
from .bench import add_noise, compare_models, gen_lfm, gen_three_component
from .core import AssoConfig
from .errors import (
    ConfigError,
    DegenerateWindowError,
    EmptyRidgeError,
    InsufficientDataError,
    InvalidParameterError,
    NoPeakError,
    SignalIOError,
    UndefinedEntropyError,
)
from .io import read_signal, write_series_csv, write_signal_csv, write_table, write_tf_csv
from .pipeline import resolve_params, separate, smooth_track
from .stft import SigmaTrack, adaptive_stft, set_fft_workers
from .tuning import entropy_profile

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CONFIG = 4
EXIT_NUMERIC = 5

_CASES = {"lfm": gen_lfm, "three_component": gen_three_component}

_TRUE_WORDS = {"true", "yes", "on", "1"}
_FALSE_WORDS = {"false", "no", "off", "0"}


def _parse_bool(text):
    word = text.strip().lower()
    if word in _TRUE_WORDS:
        return True
    if word in _FALSE_WORDS:
        return False
    raise ValueError(f"not a boolean: {text!r}")


_CONFIG_PARSERS = {
    "tau0": float,
    "truncation_radius": float,
    "gamma1_rel": float,
    "gamma2_rel": float,
    "sigma_min": float,
    "sigma_max": float,
    "sigma_step": float,
    "sigma_grid_size": int,
    "delta_sigma": float,
    "zeta": float,
    "refine_epsilon": float,
    "smooth_len": int,
    "max_components": int,
    "freq_bins": int,
    "fit_halfwidth": int,
    "remove_trend": _parse_bool,
    "trend_sigma": float,
    "lambda0_convention": str,
    "recovery_model": str,
    "smooth_chirp_rate": _parse_bool,
    "refine_sigma": _parse_bool,
}


def load_config(path):
    """Parse a flat key=value file into an AssoConfig.

    Blank lines and '#' comments are skipped; keys mirror the AssoConfig
    field names and every key is optional.  The value 'none' resets a field
    to its resolve-at-runtime default.
    """
    kwargs = {}
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_PARSERS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            if value.lower() == "none":
                kwargs[key] = None
                continue
            try:
                kwargs[key] = _CONFIG_PARSERS[key](value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    try:
        return AssoConfig(**kwargs)
    except InvalidParameterError as exc:
        raise ConfigError(f"{path}: {exc}") from None


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Record of one separation run: what went in, what came out, how long."""

    input: dict
    config: dict
    resolved: dict
    n_components: int
    stopping_reason: str
    component_diagnostics: tuple
    outputs: tuple
    version: str
    timings: dict

    def to_dict(self):
        out = dataclasses.asdict(self)
        out["component_diagnostics"] = list(self.component_diagnostics)
        out["outputs"] = list(self.outputs)
        return out

    def write(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _note(path):
    print(f"wrote {path}")


def _load_optional_config(path):
    return load_config(path) if path else AssoConfig()


def cmd_synth(args):
    case = _CASES[args.case]()
    emitted = case.signal
    if args.snr is not None:
        emitted = add_noise(case.signal, args.snr, args.seed)
    write_signal_csv(args.out, emitted)
    _note(args.out)
    truth_path = args.truth_out
    if truth_path is None:
        stem, dot, suffix = str(args.out).rpartition(".")
        truth_path = f"{stem}_truth.{suffix}" if dot else f"{args.out}_truth"
    rows = case.truth_matrix()
    header = ["time"] + [f"comp{k + 1}" for k in range(rows.shape[0])]
    write_table(truth_path, header, [case.signal.times()] + list(rows))
    _note(truth_path)
    return EXIT_OK


def cmd_stft(args):
    x = read_signal(args.input, args.fs)
    config = _load_optional_config(args.config)
    if args.sigma is not None:
        config = dataclasses.replace(
            config, sigma_min=args.sigma, sigma_max=args.sigma, sigma_step=None, sigma_grid_size=1
        )
    params = resolve_params(config, x)
    if args.auto:
        profile = entropy_profile(x, params.sigma_grid, params.zeta, params.grid, params.window)
        values = smooth_track(profile.argmin_track().values, params.smooth_len)
    else:
        values = SigmaTrack.constant(args.sigma, len(x)).values
    tf = adaptive_stft(x, SigmaTrack(values), params.grid, params.window)
    write_tf_csv(args.out, tf)
    _note(args.out)
    sigma_path = args.sigma_out
    if sigma_path is None:
        stem, dot, suffix = str(args.out).rpartition(".")
        sigma_path = f"{stem}_sigma.{suffix}" if dot else f"{args.out}_sigma"
    write_series_csv(sigma_path, x.times(), values, value_name="sigma")
    _note(sigma_path)
    return EXIT_OK


def cmd_separate(args):
    t0 = time.perf_counter()
    x = read_signal(args.input, args.fs)
    config = _load_optional_config(args.config)
    t1 = time.perf_counter()
    result = separate(x, config)
    t2 = time.perf_counter()

    os.makedirs(args.out_dir, exist_ok=True)
    times = x.times()
    n = len(x)
    outputs = []

    def emit_series(name, values):
        path = os.path.join(args.out_dir, name)
        write_series_csv(path, times, values)
        outputs.append(name)
        _note(path)

    emit_series("trend.csv", result.trend)
    emit_series("residual.csv", result.residual)
    for k, comp in enumerate(result.components, start=1):
        emit_series(f"component_{k}.csv", comp.full_samples(n))

    ridge_cols = [[], [], [], [], []]
    for k, comp in enumerate(result.components, start=1):
        ridge = comp.ridge
        ridge_cols[0].extend([float(k)] * len(ridge))
        ridge_cols[1].extend((x.start_time + ridge.frames() / x.sample_rate).tolist())
        ridge_cols[2].extend(ridge.eta_hz.tolist())
        ridge_cols[3].extend(ridge.magnitude.tolist())
        ridge_cols[4].extend(comp.chirp_track.values.tolist())
    ridges_path = os.path.join(args.out_dir, "ridges.csv")
    write_table(ridges_path, ("component", "time", "eta", "magnitude", "r"), ridge_cols)
    outputs.append("ridges.csv")
    _note(ridges_path)

    t3 = time.perf_counter()
    diagnostics = tuple(
        {
            "index": k,
            "model": comp.model,
            "peak_magnitude": diag.peak_magnitude,
            "mean_eta_hz": float(comp.ridge.eta_hz.mean()),
            "start_frame": comp.start_frame,
            "stop_frame": comp.stop_frame,
            "energy_before": diag.energy_before,
            "energy_after": diag.energy_after,
        }
        for k, (comp, diag) in enumerate(zip(result.components, result.passes), start=1)
    )
    manifest = RunManifest(
        input={
            "path": str(args.input),
            "format": "wav" if str(args.input).lower().endswith(".wav") else "csv",
            "n_samples": n,
            "sample_rate": x.sample_rate,
            "start_time": x.start_time,
        },
        config=dataclasses.asdict(config),
        resolved={
            "sigma_min": result.params.sigma_min,
            "sigma_max": result.params.sigma_max,
            "delta_sigma": result.params.delta_sigma,
            "zeta": result.params.zeta,
            "trend_sigma": result.params.trend_sigma,
            "smooth_len": result.params.smooth_len,
            "n_sigma_grid": int(result.params.sigma_grid.size),
            "n_freq_bins": len(result.params.grid),
        },
        n_components=result.n_components,
        stopping_reason=result.stopping_reason,
        component_diagnostics=diagnostics,
        outputs=tuple(outputs),
        version=__version__,
        timings={"read_s": t1 - t0, "separate_s": t2 - t1, "write_s": t3 - t2},
    )
    manifest_path = os.path.join(args.out_dir, "manifest.json")
    manifest.write(manifest_path)
    _note(manifest_path)
    return EXIT_OK


def cmd_bench(args):
    snr_list = [float(part) for part in args.snr.split(",") if part.strip()]
    if not snr_list:
        print("error: --snr must list at least one level", file=sys.stderr)
        return EXIT_USAGE
    case = _CASES[args.case]()
    config = _load_optional_config(args.config)
    report = compare_models(case, config, snr_list=snr_list, n_seeds=args.seeds, seed0=args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    report_path = os.path.join(args.out_dir, "report.csv")
    summary_path = os.path.join(args.out_dir, "summary.csv")
    report.write_csv(report_path)
    report.write_summary_csv(summary_path)
    _note(report_path)
    _note(summary_path)
    for row in report.summary():
        print(
            f"snr={row.snr_db:g} model={row.model} mean_mse={row.mean_mse:.6g} "
            f"std={row.std_mse:.6g} n={row.n_seeds}"
        )
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base random seed for noise generation")
    common.add_argument("--threads", type=int, default=None, help="cap FFT worker threads")

    parser = argparse.ArgumentParser(prog="asso", description="Adaptive signal separation toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic benchmark record")
    p.add_argument("case", choices=sorted(_CASES), help="which benchmark record to synthesize")
    p.add_argument("--out", required=True, help="output signal CSV path")
    p.add_argument("--truth-out", default=None, help="ground-truth CSV path (default <out>_truth.csv)")
    p.add_argument("--snr", type=float, default=None, help="add noise at this SNR in dB")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stft", parents=[common], help="compute a time-frequency representation")
    p.add_argument("input", help="input record (.csv or .wav)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--sigma", type=float, default=None, help="fixed window width in seconds")
    group.add_argument("--auto", action="store_true", help="select a width track by spectral concentration")
    p.add_argument("--fs", type=float, default=None, help="sample rate for CSV input")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--out", required=True, help="output TF CSV path")
    p.add_argument("--sigma-out", default=None, help="width-track CSV path (default <out>_sigma.csv)")
    p.set_defaults(func=cmd_stft)

    p = sub.add_parser("separate", parents=[common], help="run the separation pipeline")
    p.add_argument("input", help="input record (.csv or .wav)")
    p.add_argument("--fs", type=float, default=None, help="sample rate for CSV input")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--out-dir", required=True, help="directory for result CSVs and manifest")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("bench", parents=[common], help="score recovery formulas over a noise grid")
    p.add_argument("--case", choices=sorted(_CASES), default="three_component")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--out-dir", required=True, help="directory for report CSVs")
    p.add_argument("--snr", default="10,15,20", help="comma-separated SNR levels in dB")
    p.add_argument("--seeds", type=int, default=10, help="number of noise seeds per level")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    level = os.environ.get("ASSO_LOG")
    if level:
        logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.threads is not None:
            set_fft_workers(args.threads)
        return args.func(args)
    except SignalIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (
        DegenerateWindowError,
        NoPeakError,
        EmptyRidgeError,
        UndefinedEntropyError,
        InsufficientDataError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
