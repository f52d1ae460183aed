"""Command-line front end: config parsing, orchestration, result emission.

Configuration is flat sectioned key=value text (INI). Powers in config files
and CSV outputs are milliwatts to match lab bookkeeping; everything internal
is SI. All commands are deterministic: identical inputs give byte-identical
outputs. Exit codes: 0 success, 1 input error, 2 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import re
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import presets
from .analysis import (
    FitResult,
    MeasurementSeries,
    effective_roundtrip_amplitude,
    finesse,
    fit_parameters,
    format_sweep_csv,
    linewidth_and_fsr,
    measured_depletion,
    measured_efficiency,
    monolithic_roundtrip_length,
    optimize_coupler,
    read_measurements_csv,
    sweep_pump,
    _model_depletion,
)
from .cavity import (
    CavityConfig,
    CavityInstabilityError,
    DriveConfig,
    SolverSettings,
    photon_budget,
    solve_steady_state,
    solve_steady_state_batch,
)
from .model import CrystalSpec, MetricsConfig, MirrorSpec, standard_channels


class ConfigError(Exception):
    """Configuration problem with a file/line anchored message."""


_SCHEMA: dict[str, tuple[str, ...]] = {
    "crystal": (
        "length_mm",
        "absorption_1550_pct_per_cm",
        "absorption_810_pct_per_cm",
        "absorption_532_pct_per_cm",
        "coupling",
        "phase_mismatch_per_m",
    ),
    "mirrors": (
        "left_1550",
        "left_810",
        "left_532",
        "right_1550",
        "right_810",
        "right_532",
    ),
    "phases": ("roundtrip_1550", "roundtrip_810", "roundtrip_532"),
    "indices": ("n_1550", "n_810", "n_532"),
    "solver": ("max_roundtrips", "rel_tolerance", "steps_per_pass"),
    "drive": ("signal_mW", "pump_mW", "phase_1550", "phase_810"),
    "sweep": ("pump_min_mW", "pump_max_mW", "points"),
    "optimize": ("r_min", "r_max", "grid_points", "pump_budget_mW", "vary"),
    "fit": ("free", "normalization", "max_evals"),
    "metrics": ("gamma", "kappa_ratio"),
    "resonator": ("roundtrip_length_m", "finesse", "channel"),
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs, resolved from config text plus defaults."""

    cavity: CavityConfig
    drive: DriveConfig
    metrics: MetricsConfig
    sweep_min: float
    sweep_max: float
    sweep_points: int
    opt_r_min: float
    opt_r_max: float
    opt_grid_points: int
    opt_pump_budget: float
    opt_vary: str
    fit_free: tuple[str, ...]
    fit_normalization: str
    fit_max_evals: int
    resonator_roundtrip_length: float | None
    resonator_finesse: float | None
    resonator_channel: str


def _anchor(path: str, text: str, section: str, key: str | None) -> str:
    """Best-effort file:line prefix for a config message."""
    lines = text.splitlines()
    section_line = 0
    section_pattern = re.compile(r"^\s*\[" + re.escape(section) + r"\]\s*")
    for i, line in enumerate(lines, start=1):
        if section_pattern.match(line):
            section_line = i
            break
    if key is None or section_line == 0:
        return f"{path}:{section_line or 1}"
    key_pattern = re.compile(r"^\s*" + re.escape(key) + r"\s*[=:]")
    for i in range(section_line, len(lines)):
        if re.match(r"^\s*\[", lines[i]) and i >= section_line:
            break
        if key_pattern.match(lines[i]):
            return f"{path}:{i + 1}"
    return f"{path}:{section_line}"


class _ConfigReader:
    """Schema-checked view over parsed config text."""

    def __init__(self, path: str, text: str) -> None:
        self.path = path
        self.text = text
        parser = configparser.ConfigParser(
            interpolation=None, inline_comment_prefixes=("#", ";")
        )
        parser.optionxform = str  # keep mW capitalization significant
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        self.parser = parser
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(
                    f"{_anchor(path, text, section, None)}: unknown section [{section}]"
                )
            for key in parser[section]:
                if key not in _SCHEMA[section]:
                    raise ConfigError(
                        f"{_anchor(path, text, section, key)}: "
                        f"unknown key '{key}' in [{section}]"
                    )

    def get(self, section: str, key: str, default, cast):
        if not self.parser.has_option(section, key):
            return default
        raw = self.parser.get(section, key)
        try:
            return cast(raw)
        except (TypeError, ValueError):
            raise ConfigError(
                f"{_anchor(self.path, self.text, section, key)}: "
                f"cannot parse {key} value {raw!r}"
            ) from None

    def get_float(self, section: str, key: str, default: float) -> float:
        return self.get(section, key, default, float)

    def get_int(self, section: str, key: str, default: int) -> int:
        return self.get(section, key, default, int)


def _empty_reader() -> _ConfigReader:
    return _ConfigReader("<defaults>", "")


def load_run_config(config_path: str | None) -> RunConfig:
    """Resolve a config file (or the built-in reference values) to a RunConfig."""
    if config_path is None:
        reader = _empty_reader()
    else:
        path = Path(config_path)
        if not path.is_file():
            raise ConfigError(f"{config_path}: config file not found")
        reader = _ConfigReader(str(path), path.read_text())

    # a value quoted in %/cm is numerically equal to 1/m
    crystal_kwargs = dict(
        length=reader.get_float("crystal", "length_mm", presets.REFERENCE_CRYSTAL_LENGTH * 1e3)
        * 1e-3,
        alpha_signal=reader.get_float(
            "crystal", "absorption_1550_pct_per_cm", presets.REFERENCE_ALPHA_SIGNAL
        ),
        alpha_pump=reader.get_float(
            "crystal", "absorption_810_pct_per_cm", presets.REFERENCE_ALPHA_PUMP
        ),
        alpha_sum=reader.get_float(
            "crystal", "absorption_532_pct_per_cm", presets.REFERENCE_ALPHA_SUM
        ),
        kappa=reader.get_float("crystal", "coupling", presets.REFERENCE_KAPPA),
        delta_k=reader.get_float(
            "crystal", "phase_mismatch_per_m", presets.REFERENCE_DELTA_K
        ),
    )
    mirror_kwargs = dict(
        left_signal=reader.get_float("mirrors", "left_1550", presets.REFERENCE_LEFT_SIGNAL),
        left_pump=reader.get_float("mirrors", "left_810", presets.REFERENCE_LEFT_PUMP),
        left_sum=reader.get_float("mirrors", "left_532", presets.REFERENCE_LEFT_SUM),
        right_signal=reader.get_float(
            "mirrors", "right_1550", presets.REFERENCE_RIGHT_SIGNAL
        ),
        right_pump=reader.get_float("mirrors", "right_810", presets.REFERENCE_RIGHT_PUMP),
        right_sum=reader.get_float("mirrors", "right_532", presets.REFERENCE_RIGHT_SUM),
    )
    solver = SolverSettings(
        max_roundtrips=reader.get_int("solver", "max_roundtrips", 20000),
        rel_tolerance=reader.get_float("solver", "rel_tolerance", 1e-10),
        steps_per_pass=reader.get_int("solver", "steps_per_pass", 200),
    )
    channels = standard_channels(
        n_signal=reader.get_float("indices", "n_1550", 1.8157),
        n_pump=reader.get_float("indices", "n_810", 1.8423),
        n_sum=reader.get_float("indices", "n_532", 1.8893),
    )
    phases = (
        reader.get_float("phases", "roundtrip_1550", 0.0),
        reader.get_float("phases", "roundtrip_810", 0.0),
        reader.get_float("phases", "roundtrip_532", 0.0),
    )
    try:
        cavity = CavityConfig(
            crystal=CrystalSpec(**crystal_kwargs),
            mirrors=MirrorSpec(**mirror_kwargs),
            roundtrip_phase=phases,
            channels=channels,
            solver=solver,
        )
        drive = DriveConfig(
            input_power_signal=reader.get_float(
                "drive", "signal_mW", presets.REFERENCE_SIGNAL_POWER * 1e3
            )
            * 1e-3,
            input_power_pump=reader.get_float(
                "drive", "pump_mW", presets.REFERENCE_PEAK_PUMP * 1e3
            )
            * 1e-3,
            phase_signal=reader.get_float("drive", "phase_1550", 0.0),
            phase_pump=reader.get_float("drive", "phase_810", 0.0),
        )
        metrics = MetricsConfig(
            gamma=reader.get_float("metrics", "gamma", presets.REFERENCE_GAMMA),
            kappa_ratio=reader.get_float("metrics", "kappa_ratio", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"{reader.path}: {exc}") from None

    free_text = reader.get("fit", "free", "gamma", str)
    fit_free = tuple(name.strip() for name in free_text.split(",") if name.strip())
    vary = reader.get("optimize", "vary", "signal", str)
    normalization = reader.get("fit", "normalization", "incident", str)
    channel = reader.get("resonator", "channel", "signal", str)
    if channel not in ("signal", "pump", "sum"):
        raise ConfigError(
            f"{_anchor(reader.path, reader.text, 'resonator', 'channel')}: "
            f"channel must be signal, pump, or sum"
        )
    length_value = reader.get_float("resonator", "roundtrip_length_m", -1.0)
    finesse_value = reader.get_float("resonator", "finesse", -1.0)
    return RunConfig(
        cavity=cavity,
        drive=drive,
        metrics=metrics,
        sweep_min=reader.get_float("sweep", "pump_min_mW", 0.0) * 1e-3,
        sweep_max=reader.get_float("sweep", "pump_max_mW", 190.0) * 1e-3,
        sweep_points=reader.get_int("sweep", "points", 25),
        opt_r_min=reader.get_float("optimize", "r_min", 0.85),
        opt_r_max=reader.get_float("optimize", "r_max", 0.965),
        opt_grid_points=reader.get_int("optimize", "grid_points", 24),
        opt_pump_budget=reader.get_float(
            "optimize", "pump_budget_mW", presets.REFERENCE_PUMP_BUDGET * 1e3
        )
        * 1e-3,
        opt_vary=vary,
        fit_free=fit_free,
        fit_normalization=normalization,
        fit_max_evals=reader.get_int("fit", "max_evals", 200),
        resonator_roundtrip_length=length_value if length_value > 0.0 else None,
        resonator_finesse=finesse_value if finesse_value > 0.0 else None,
        resonator_channel=channel,
    )


def _emit(text: str, out: str | None) -> None:
    sys.stdout.write(text)
    if out is not None:
        Path(out).write_text(text)


def cmd_simulate(run: RunConfig, out: str | None) -> int:
    """Solve one steady state and report ports, metrics, and budget residuals."""
    result = solve_steady_state(run.cavity, run.drive)
    budget = photon_budget(result, run.drive, run.cavity.channels)
    lines = [
        f"converged = {str(result.converged).lower()}",
        f"roundtrips = {result.roundtrips_used}",
        f"eta = {result.eta:.9g}",
        f"delta = {result.delta_model:.9g}",
        f"reflected_1550_mW = {result.reflected_1550 * 1e3:.9g}",
        f"transmitted_1550_mW = {result.transmitted_1550 * 1e3:.9g}",
        f"reflected_810_mW = {result.reflected_810 * 1e3:.9g}",
        f"transmitted_810_mW = {result.transmitted_810 * 1e3:.9g}",
        f"out_532_mW = {result.out_532 * 1e3:.9g}",
        f"leak_532_left_mW = {result.leak_532_left * 1e3:.9g}",
        f"circulating_1550_mW = {result.circulating_1550 * 1e3:.9g}",
        f"circulating_810_mW = {result.circulating_810 * 1e3:.9g}",
        f"circulating_532_mW = {result.circulating_532 * 1e3:.9g}",
        f"budget_residual_1550 = {budget.residual_signal:.9g}",
        f"budget_residual_810 = {budget.residual_pump:.9g}",
    ]
    _emit("\n".join(lines) + "\n", out)
    return 0 if result.converged else 2


def cmd_sweep(run: RunConfig, out: str | None) -> int:
    """Sweep the pump grid and emit the sweep CSV."""
    if run.sweep_points < 1:
        raise ConfigError("sweep points must be at least 1")
    if run.sweep_max < run.sweep_min:
        raise ConfigError("sweep pump_max_mW must be at least pump_min_mW")
    grid = np.linspace(run.sweep_min, run.sweep_max, run.sweep_points)
    sweep = sweep_pump(run.cavity, run.drive.input_power_signal, grid)
    _emit(format_sweep_csv(sweep), out)
    return 0 if all(row.converged for row in sweep.rows) else 2


def cmd_optimize(run: RunConfig, out: str | None) -> int:
    """Optimize the coupler reflectivity and emit the design grid CSV."""
    design = optimize_coupler(
        run.cavity,
        run.drive.input_power_signal,
        run.opt_pump_budget,
        reflectivity_range=(run.opt_r_min, run.opt_r_max),
        grid_points=run.opt_grid_points,
        vary=run.opt_vary,
    )
    if not math.isfinite(design.best_eta):
        sys.stderr.write("optimize: no grid point converged\n")
        return 2
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("reflectivity", "pump_mW", "eta"))
    for point in design.grid:
        writer.writerow(
            (
                f"{point.reflectivity:.9g}",
                f"{point.pump_power * 1e3:.9g}",
                f"{point.eta:.9g}",
            )
        )
    summary = (
        f"best_reflectivity = {design.best_reflectivity:.9g}\n"
        f"best_pump_mW = {design.best_pump_power * 1e3:.9g}\n"
        f"best_eta = {design.best_eta:.9g}\n"
    )
    sys.stdout.write(summary)
    if out is not None:
        Path(out).write_text(buffer.getvalue())
    else:
        sys.stdout.write(buffer.getvalue())
    return 0


def cmd_fit(run: RunConfig, out: str | None, measurements_path: str) -> int:
    """Fit free parameters against a measurement CSV and report them."""
    if not run.fit_free:
        raise ConfigError("fit requires at least one free parameter ([fit] free)")
    series = read_measurements_csv(measurements_path)
    result = fit_parameters(
        series,
        run.cavity,
        free=run.fit_free,
        normalization=run.fit_normalization,
        max_evals=run.fit_max_evals,
    )
    lines = [
        f"gamma = {result.gamma:.9g}",
        f"kappa = {result.kappa:.9g}",
        f"delta_k = {result.delta_k:.9g}",
        f"residual = {result.residual:.9g}",
        f"iterations = {result.iterations}",
        f"converged = {str(result.converged).lower()}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if out is not None:
        crystal = replace(
            run.cavity.crystal, kappa=result.kappa, delta_k=result.delta_k
        )
        fitted = replace(run.cavity, crystal=crystal)
        drives = [
            DriveConfig(input_power_signal=sig, input_power_pump=pump)
            for sig, pump in zip(series.pd1550_in, series.pump_power)
        ]
        results = solve_steady_state_batch([fitted] * len(drives), drives)
        eta_fit = [r.eta for r in results]
        delta_fit = _model_depletion(results, run.fit_normalization)
        eta_meas = measured_efficiency(series, MetricsConfig(gamma=result.gamma))
        delta_meas = measured_depletion(series, run.fit_normalization)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(("pump_mW", "eta_meas", "eta_fit", "delta_meas", "delta_fit"))
        for i in range(len(series)):
            writer.writerow(
                (
                    f"{series.pump_power[i] * 1e3:.9g}",
                    f"{eta_meas[i]:.9g}",
                    f"{eta_fit[i]:.9g}",
                    f"{delta_meas[i]:.9g}",
                    f"{delta_fit[i]:.9g}",
                )
            )
        Path(out).write_text(buffer.getvalue())
    return 0 if result.converged else 2


def cmd_linewidth(run: RunConfig, out: str | None) -> int:
    """Report roundtrip length, finesse, free spectral range, and linewidth."""
    channel = run.resonator_channel
    if run.resonator_roundtrip_length is not None:
        roundtrip = run.resonator_roundtrip_length
    else:
        index = run.cavity.channels.by_label(channel).refractive_index
        roundtrip = monolithic_roundtrip_length(run.cavity.crystal.length, index)
    if run.resonator_finesse is not None:
        finesse_value = run.resonator_finesse
    else:
        finesse_value = finesse(effective_roundtrip_amplitude(run.cavity, channel))
    fsr, linewidth = linewidth_and_fsr(roundtrip, finesse_value)
    lines = [
        f"channel = {channel}",
        f"roundtrip_length_m = {roundtrip:.9g}",
        f"finesse = {finesse_value:.9g}",
        f"fsr_GHz = {fsr * 1e-9:.9g}",
        f"linewidth_MHz = {linewidth * 1e-6:.9g}",
    ]
    _emit("\n".join(lines) + "\n", out)
    return 0


class _Parser(argparse.ArgumentParser):
    """argparse front end that exits with code 1 on usage errors."""

    def error(self, message):  # noqa: A003 - argparse API
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sfgcavity",
        description="Cavity-enhanced sum-frequency conversion toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "solve one steady state and report it"),
        ("sweep", "sweep pump power and emit CSV"),
        ("optimize", "optimize the coupler reflectivity"),
        ("fit", "fit parameters to a measurement CSV"),
        ("linewidth", "report resonator linewidth quantities"),
    ):
        command = sub.add_parser(name, help=help_text)
        command.add_argument("--config", default=None, help="config file path")
        command.add_argument("--out", default=None, help="output file path")
        if name == "fit":
            command.add_argument(
                "--measurements", required=True, help="measurement CSV path"
            )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = load_run_config(args.config)
        if args.command == "simulate":
            return cmd_simulate(run, args.out)
        if args.command == "sweep":
            return cmd_sweep(run, args.out)
        if args.command == "optimize":
            return cmd_optimize(run, args.out)
        if args.command == "fit":
            return cmd_fit(run, args.out, args.measurements)
        return cmd_linewidth(run, args.out)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except CavityInstabilityError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
