"""Pump sweeps, peak calibration, coupler design, fitting, and linewidth helpers.

Everything here drives the steady-state cavity solver as a black box. Sweeps
and grid searches batch all their operating points into one solver call so
the array backend can amortize the roundtrip iteration; local refinements
(parabolic vertex steps, golden-section bracketing, Nelder-Mead) then work on
a handful of direct solves.

The fitting entry point compares model curves against photodiode-style
measurement series. The detector calibration factor gamma enters the measured
efficiency linearly, so its optimal value is profiled out in closed form and
only the nonlinear parameters (coupling strength, phase mismatch) are
searched with Nelder-Mead restarts on scaled coordinates.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize as sp_optimize

from .cavity import (
    CavityConfig,
    DriveConfig,
    SteadyStateResult,
    solve_steady_state_batch,
)
from .model import MetricsConfig, SPEED_OF_LIGHT, conversion_efficiency

SWEEP_CSV_HEADER = ("pump_mW", "eta", "delta", "converged", "roundtrips")
MEASUREMENT_CSV_HEADER = (
    "pump_mW",
    "pd1550_in",
    "pd1550_refl",
    "pd1550_trans",
    "pd810_trans",
    "pd532_trans",
)

_FIT_PARAMETERS = ("gamma", "kappa", "delta_k")
_NORMALIZATION_MODES = ("baseline", "incident")


# ---------------------------------------------------------------------------
# pump sweeps


@dataclass(frozen=True)
class SweepRow:
    """One operating point of a pump sweep."""

    pump_power: float
    eta: float
    delta_model: float
    converged: bool
    roundtrips_used: int


@dataclass(frozen=True)
class SweepResult:
    """Pump sweep at fixed signal power, rows sorted by ascending pump."""

    signal_power: float
    rows: tuple[SweepRow, ...]

    def __post_init__(self) -> None:
        pumps = [row.pump_power for row in self.rows]
        if any(b < a for a, b in zip(pumps, pumps[1:])):
            raise ValueError("sweep rows must be sorted by ascending pump power")

    def pump_powers(self) -> np.ndarray:
        return np.array([row.pump_power for row in self.rows])

    def etas(self) -> np.ndarray:
        return np.array([row.eta for row in self.rows])

    def deltas(self) -> np.ndarray:
        return np.array([row.delta_model for row in self.rows])


def sweep_pump(
    cavity: CavityConfig, signal_power: float, pump_powers: Iterable[float]
) -> SweepResult:
    """Solve the steady state at each pump power and collect eta and delta.

    All points run as one batch; the auxiliary pump-off lane is shared.
    Non-converged points are kept in the result, flagged, and warned about.
    """
    pumps = sorted(float(p) for p in pump_powers)
    if not pumps:
        raise ValueError("pump_powers must contain at least one value")
    drives = [DriveConfig(signal_power, pump) for pump in pumps]
    results = solve_steady_state_batch([cavity] * len(pumps), drives)
    rows = tuple(
        SweepRow(
            pump_power=pump,
            eta=res.eta,
            delta_model=res.delta_model,
            converged=res.converged,
            roundtrips_used=res.roundtrips_used,
        )
        for pump, res in zip(pumps, results)
    )
    bad = sum(1 for row in rows if not row.converged)
    if bad:
        warnings.warn(
            f"{bad} of {len(rows)} sweep points did not converge", RuntimeWarning
        )
    return SweepResult(signal_power=signal_power, rows=rows)


def format_sweep_csv(sweep: SweepResult) -> str:
    """Render a sweep as CSV text with pump in mW and %.9g float formatting."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for row in sweep.rows:
        writer.writerow(
            [
                f"{row.pump_power * 1e3:.9g}",
                f"{row.eta:.9g}",
                f"{row.delta_model:.9g}",
                int(row.converged),
                row.roundtrips_used,
            ]
        )
    return buffer.getvalue()


def write_sweep_csv(sweep: SweepResult, path: str | Path) -> None:
    """Write a sweep as CSV; see format_sweep_csv for the layout."""
    with open(path, "w", newline="") as handle:
        handle.write(format_sweep_csv(sweep))


def read_sweep_csv(path: str | Path, signal_power: float = float("nan")) -> SweepResult:
    """Read a sweep CSV written by write_sweep_csv.

    The file does not store the signal power; pass it if downstream code
    needs it.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise ValueError("sweep CSV is empty") from None
        if header != SWEEP_CSV_HEADER:
            raise ValueError(
                f"unexpected sweep CSV header {header!r}; expected {SWEEP_CSV_HEADER!r}"
            )
        rows = []
        for record in reader:
            if not record:
                continue
            rows.append(
                SweepRow(
                    pump_power=float(record[0]) * 1e-3,
                    eta=float(record[1]),
                    delta_model=float(record[2]),
                    converged=bool(int(record[3])),
                    roundtrips_used=int(record[4]),
                )
            )
    return SweepResult(signal_power=signal_power, rows=tuple(rows))


# ---------------------------------------------------------------------------
# peak estimation and coupling calibration


@dataclass(frozen=True)
class PeakEstimate:
    """Location and height of a sweep maximum.

    interior is False when the maximum sits on the sweep edge, in which case
    no parabolic refinement was possible and the grid point is returned.
    """

    pump_power: float
    eta: float
    interior: bool


def _parabolic_vertex(
    xs: Sequence[float], ys: Sequence[float], index: int
) -> tuple[float, float]:
    """Vertex of the parabola through three points around a grid maximum."""
    x0, x1, x2 = xs[index - 1], xs[index], xs[index + 1]
    y0, y1, y2 = ys[index - 1], ys[index], ys[index + 1]
    d = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if d == 0.0:
        return x1, y1
    x_pk = x1 - 0.5 * ((x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)) / d
    y_pk = (
        y0 * (x_pk - x1) * (x_pk - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (x_pk - x0) * (x_pk - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (x_pk - x0) * (x_pk - x1) / ((x2 - x0) * (x2 - x1))
    )
    return x_pk, y_pk


def find_peak(sweep: SweepResult) -> PeakEstimate:
    """Estimate the efficiency maximum of a sweep.

    Only converged rows participate. An interior grid maximum is refined by
    the parabola through its neighbors; an edge maximum is returned as is.
    """
    xs = [row.pump_power for row in sweep.rows if row.converged]
    ys = [row.eta for row in sweep.rows if row.converged]
    if len(xs) < 3:
        raise ValueError("peak estimation needs at least 3 converged sweep points")
    index = max(range(len(ys)), key=ys.__getitem__)
    if index == 0 or index == len(ys) - 1:
        return PeakEstimate(pump_power=xs[index], eta=ys[index], interior=False)
    x_pk, y_pk = _parabolic_vertex(xs, ys, index)
    return PeakEstimate(pump_power=x_pk, eta=y_pk, interior=True)


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of the coupling calibration loop.

    history holds one (kappa used, peak pump found) pair per iteration;
    kappa is the final updated value.
    """

    kappa: float
    history: tuple[tuple[float, float], ...]

    def apply(self, cavity: CavityConfig) -> CavityConfig:
        """Return the cavity with its crystal coupling set to the result."""
        return replace(cavity, crystal=replace(cavity.crystal, kappa=self.kappa))


def calibrate_kappa(
    cavity: CavityConfig,
    signal_power: float,
    measured_peak_pump: float,
    pump_max: float = 0.190,
    grid_points: int = 25,
    iterations: int = 3,
) -> CalibrationResult:
    """Scale the coupling so the model's peak pump matches a measured one.

    The peak pump power of the efficiency curve scales as 1/kappa**2, so each
    iteration sweeps the current model, locates its peak, and applies
    kappa *= sqrt(peak/measured). Three iterations settle well below the
    sweep's own peak-location resolution.
    """
    if measured_peak_pump <= 0.0:
        raise ValueError("measured_peak_pump must be positive")
    if grid_points < 5:
        raise ValueError("calibration needs at least 5 grid points")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    grid = np.linspace(0.0, pump_max, grid_points)
    kappa = cavity.crystal.kappa
    history = []
    for _ in range(iterations):
        trial = replace(cavity, crystal=replace(cavity.crystal, kappa=kappa))
        sweep = sweep_pump(trial, signal_power, grid)
        peak = find_peak(sweep)
        history.append((kappa, peak.pump_power))
        kappa *= math.sqrt(peak.pump_power / measured_peak_pump)
    return CalibrationResult(kappa=kappa, history=tuple(history))


# ---------------------------------------------------------------------------
# coupler design optimization


@dataclass(frozen=True)
class CouplerPoint:
    """Best pump and efficiency found for one coupler reflectivity."""

    reflectivity: float
    pump_power: float
    eta: float


@dataclass(frozen=True)
class CouplerDesign:
    """Result of the coupler reflectivity optimization."""

    best_reflectivity: float
    best_pump_power: float
    best_eta: float
    vary: str
    grid: tuple[CouplerPoint, ...]


_PUMP_GRID_POINTS = 12


def _cavity_with_coupler(cavity: CavityConfig, reflectivity: float, vary: str):
    if vary == "signal":
        mirrors = replace(cavity.mirrors, left_signal=reflectivity)
    else:
        mirrors = replace(
            cavity.mirrors, left_signal=reflectivity, left_pump=reflectivity
        )
    return replace(cavity, mirrors=mirrors)


def _batch_eta(
    cavities: Sequence[CavityConfig],
    signal_power: float,
    pumps: Sequence[float],
) -> np.ndarray:
    drives = [DriveConfig(signal_power, pump) for pump in pumps]
    results = solve_steady_state_batch(list(cavities), drives)
    etas = np.array([res.eta for res in results])
    bad = sum(1 for res in results if not res.converged)
    if bad:
        warnings.warn(
            f"{bad} of {len(results)} optimizer points did not converge "
            "and were excluded",
            RuntimeWarning,
        )
        etas[[not res.converged for res in results]] = -np.inf
    return etas


def _polish_pump(
    cavity: CavityConfig,
    signal_power: float,
    pump: float,
    budget: float,
    rounds: int = 2,
) -> tuple[float, float]:
    """Refine the pump power at fixed mirrors; returns (pump, eta)."""
    best_pump = min(max(pump, budget * 1e-3), budget)
    best_eta = -np.inf
    for _ in range(rounds):
        candidates = sorted(
            {
                min(max(best_pump * scale, budget * 1e-3), budget)
                for scale in (0.85, 1.0, 1.15)
            }
        )
        etas = _batch_eta([cavity] * len(candidates), signal_power, candidates)
        index = int(np.argmax(etas))
        if 0 < index < len(candidates) - 1:
            vertex, _ = _parabolic_vertex(candidates, etas.tolist(), index)
            best_pump = min(max(vertex, budget * 1e-3), budget)
        else:
            best_pump = candidates[index]
        best_eta = float(
            _batch_eta([cavity], signal_power, [best_pump])[0]
        )
    return best_pump, best_eta


def optimize_coupler(
    cavity: CavityConfig,
    signal_power: float,
    pump_budget: float,
    reflectivity_range: tuple[float, float] = (0.85, 0.99),
    grid_points: int = 20,
    vary: str = "signal",
    refine_iterations: int = 10,
) -> CouplerDesign:
    """Find the left-coupler reflectivity maximizing eta within a pump budget.

    Strategy: a coarse reflectivity grid crossed with a coarse pump grid runs
    as one batch; each reflectivity gets a parabolic pump refinement and a
    direct re-solve; the best interior reflectivity is then bracketed with a
    golden-section search whose evaluations re-polish the pump locally.
    vary="signal" changes only the signal-wavelength reflectivity of the
    coupler; vary="both" moves the pump-wavelength reflectivity with it.
    """
    r_lo, r_hi = reflectivity_range
    if not (0.0 < r_lo <= r_hi < 1.0):
        raise ValueError("reflectivity_range must satisfy 0 < r_min <= r_max < 1")
    if pump_budget <= 0.0:
        raise ValueError("pump_budget must be positive")
    if vary not in ("signal", "both"):
        raise ValueError('vary must be "signal" or "both"')
    if r_lo == r_hi:
        rs = np.array([r_lo])
    else:
        if grid_points < 2:
            raise ValueError("grid_points must be at least 2 for a reflectivity range")
        rs = np.linspace(r_lo, r_hi, grid_points)
    pump_grid = np.linspace(pump_budget / _PUMP_GRID_POINTS, pump_budget, _PUMP_GRID_POINTS)

    # stage 1: full (reflectivity x pump) grid in a single batch
    cavities = []
    pumps = []
    for r in rs:
        trial = _cavity_with_coupler(cavity, float(r), vary)
        cavities.extend([trial] * len(pump_grid))
        pumps.extend(pump_grid.tolist())
    etas = _batch_eta(cavities, signal_power, pumps).reshape(len(rs), len(pump_grid))

    # stage 2: parabolic pump refinement per reflectivity, then re-solve
    refined_pumps = []
    for i in range(len(rs)):
        row = etas[i]
        index = int(np.argmax(row))
        if 0 < index < len(pump_grid) - 1:
            vertex, _ = _parabolic_vertex(pump_grid.tolist(), row.tolist(), index)
            refined_pumps.append(min(max(vertex, pump_grid[0]), pump_budget))
        else:
            refined_pumps.append(float(pump_grid[index]))
    stage2_cavities = [_cavity_with_coupler(cavity, float(r), vary) for r in rs]
    refined_etas = _batch_eta(stage2_cavities, signal_power, refined_pumps)
    grid_rows = tuple(
        CouplerPoint(reflectivity=float(r), pump_power=float(p), eta=float(e))
        for r, p, e in zip(rs, refined_pumps, refined_etas)
    )

    best = int(np.argmax(refined_etas))
    best_r = float(rs[best])
    best_pump = float(refined_pumps[best])
    best_eta = float(refined_etas[best])

    if len(rs) >= 3 and 0 < best < len(rs) - 1 and refine_iterations > 0:
        # stage 3: golden-section bracketing on reflectivity
        def eta_at(r: float) -> tuple[float, float]:
            pump_guess = float(np.interp(r, rs, refined_pumps))
            trial = _cavity_with_coupler(cavity, r, vary)
            pump, eta = _polish_pump(trial, signal_power, pump_guess, pump_budget, rounds=1)
            return eta, pump

        inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = float(rs[best - 1]), float(rs[best + 1])
        c = b - inv_phi * (b - a)
        d = a + inv_phi * (b - a)
        fc, pc = eta_at(c)
        fd, pd_ = eta_at(d)
        for _ in range(refine_iterations):
            if fc > fd:
                b, d, fd, pd_ = d, c, fc, pc
                c = b - inv_phi * (b - a)
                fc, pc = eta_at(c)
            else:
                a, c, fc, pc = c, d, fd, pd_
                d = a + inv_phi * (b - a)
                fd, pd_ = eta_at(d)
        for r, eta, pump in ((c, fc, pc), (d, fd, pd_)):
            if eta > best_eta:
                best_r, best_pump, best_eta = float(r), float(pump), float(eta)
    else:
        # edge or degenerate grid: refine the pump only
        trial = _cavity_with_coupler(cavity, best_r, vary)
        pump, eta = _polish_pump(trial, signal_power, best_pump, pump_budget)
        if eta > best_eta:
            best_pump, best_eta = pump, eta

    return CouplerDesign(
        best_reflectivity=best_r,
        best_pump_power=best_pump,
        best_eta=best_eta,
        vary=vary,
        grid=grid_rows,
    )


# ---------------------------------------------------------------------------
# measurement series and fitting


@dataclass(frozen=True)
class MeasurementSeries:
    """Photodiode readings versus pump power.

    pump_power and pd1550_in are in watts; the pd columns are detector
    readings proportional to the power at their port (the 532 nm detector
    carries the unknown calibration factor gamma).
    """

    pump_power: tuple[float, ...]
    pd1550_in: tuple[float, ...]
    pd1550_refl: tuple[float, ...]
    pd1550_trans: tuple[float, ...]
    pd810_trans: tuple[float, ...]
    pd532_trans: tuple[float, ...]

    def __post_init__(self) -> None:
        columns = (
            self.pump_power,
            self.pd1550_in,
            self.pd1550_refl,
            self.pd1550_trans,
            self.pd810_trans,
            self.pd532_trans,
        )
        n = len(self.pump_power)
        if n == 0:
            raise ValueError("measurement series must contain at least one row")
        if any(len(col) != n for col in columns):
            raise ValueError("measurement columns must have equal length")
        for col in columns:
            for value in col:
                if not math.isfinite(value) or value < 0.0:
                    raise ValueError("measurement values must be finite and non-negative")

    def __len__(self) -> int:
        return len(self.pump_power)


def write_measurements_csv(series: MeasurementSeries, path: str | Path) -> None:
    """Write a measurement series as CSV with pump in mW."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(MEASUREMENT_CSV_HEADER)
        for i in range(len(series)):
            writer.writerow(
                [
                    f"{series.pump_power[i] * 1e3:.9g}",
                    f"{series.pd1550_in[i]:.9g}",
                    f"{series.pd1550_refl[i]:.9g}",
                    f"{series.pd1550_trans[i]:.9g}",
                    f"{series.pd810_trans[i]:.9g}",
                    f"{series.pd532_trans[i]:.9g}",
                ]
            )


def read_measurements_csv(path: str | Path) -> MeasurementSeries:
    """Read a measurement series CSV (pump column in mW)."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise ValueError("measurement CSV is empty") from None
        if header != MEASUREMENT_CSV_HEADER:
            missing = [name for name in MEASUREMENT_CSV_HEADER if name not in header]
            detail = f"missing column(s) {', '.join(missing)}" if missing else f"got {header!r}"
            raise ValueError(
                f"measurement CSV header must be {','.join(MEASUREMENT_CSV_HEADER)}; {detail}"
            )
        columns: list[list[float]] = [[] for _ in MEASUREMENT_CSV_HEADER]
        for record in reader:
            if not record:
                continue
            if len(record) != len(MEASUREMENT_CSV_HEADER):
                raise ValueError(f"measurement row has {len(record)} fields: {record!r}")
            for i, value in enumerate(record):
                columns[i].append(float(value))
    return MeasurementSeries(
        pump_power=tuple(v * 1e-3 for v in columns[0]),
        pd1550_in=tuple(columns[1]),
        pd1550_refl=tuple(columns[2]),
        pd1550_trans=tuple(columns[3]),
        pd810_trans=tuple(columns[4]),
        pd532_trans=tuple(columns[5]),
    )


def generate_measurements(
    cavity: CavityConfig,
    signal_power: float,
    pump_powers: Iterable[float],
    metrics: MetricsConfig,
    noise_rel: float = 0.0,
    seed: int = 0,
) -> MeasurementSeries:
    """Produce a synthetic measurement series from the forward model.

    The 532 nm detector column is written as the true output power divided
    by metrics.gamma, so a fit against this series should recover that gamma.
    Optional multiplicative Gaussian noise models detector scatter.
    """
    pumps = sorted(float(p) for p in pump_powers)
    drives = [DriveConfig(signal_power, pump) for pump in pumps]
    results = solve_steady_state_batch([cavity] * len(pumps), drives)
    rng = np.random.default_rng(seed)

    def column(values: list[float]) -> tuple[float, ...]:
        arr = np.array(values)
        if noise_rel > 0.0:
            arr = arr * (1.0 + noise_rel * rng.standard_normal(arr.shape))
            arr = np.clip(arr, 0.0, None)
        return tuple(float(v) for v in arr)

    return MeasurementSeries(
        pump_power=tuple(pumps),
        pd1550_in=column([signal_power] * len(pumps)),
        pd1550_refl=column([r.reflected_1550 for r in results]),
        pd1550_trans=column([r.transmitted_1550 for r in results]),
        pd810_trans=column([r.transmitted_810 for r in results]),
        pd532_trans=column([r.out_532 / metrics.gamma for r in results]),
    )


def measured_efficiency(series: MeasurementSeries, metrics: MetricsConfig) -> np.ndarray:
    """Conversion efficiency implied by the detector readings and gamma."""
    return np.array(
        [
            conversion_efficiency(pd532, pd_in, metrics)
            for pd532, pd_in in zip(series.pd532_trans, series.pd1550_in)
        ]
    )


def measured_depletion(
    series: MeasurementSeries, normalization: str = "incident"
) -> np.ndarray:
    """Relative signal depletion implied by the detector readings.

    "incident" references the summed port readings to the incident power,
    delta = 1 - (refl + trans) / incident: the reflection's no-pump maximum
    (cavity far from resonance) is the incident power itself, so this is the
    normalized-signal metric with the port ratio folded in. "baseline"
    instead normalizes each port detector to its own pump-off reading and
    weights transmission by the pump-off port ratio; it works without a
    calibrated incident reading but needs a row whose pump power is far
    below the rest.
    """
    if normalization not in _NORMALIZATION_MODES:
        raise ValueError(f"normalization must be one of {_NORMALIZATION_MODES}")
    refl = np.array(series.pd1550_refl)
    trans = np.array(series.pd1550_trans)
    if normalization == "incident":
        incident = np.array(series.pd1550_in)
        if np.any(incident <= 0.0):
            raise ValueError("incident normalization needs positive pd1550_in readings")
        return 1.0 - (refl + trans) / incident
    pumps = np.array(series.pump_power)
    base = int(np.argmin(pumps))
    if pumps[base] > 1e-3 * float(np.max(pumps)):
        raise ValueError("baseline normalization needs a pump-off measurement row")
    refl0 = refl[base]
    trans0 = trans[base]
    if refl0 <= 0.0 or trans0 <= 0.0:
        raise ValueError("pump-off reflection and transmission readings must be positive")
    kappa_ratio = trans0 / refl0
    return 1.0 - (refl / refl0 + kappa_ratio * (trans / trans0)) / (1.0 + kappa_ratio)


def _model_depletion(
    results: Sequence[SteadyStateResult], normalization: str
) -> np.ndarray:
    if normalization == "baseline":
        # match the detector-relative measured form: ports over their
        # pump-off values
        values = []
        for r in results:
            denom = r.pump_off_reflected_1550 + r.pump_off_transmitted_1550
            values.append(
                1.0 - (r.reflected_1550 + r.transmitted_1550) / denom
                if denom > 0.0
                else 0.0
            )
        return np.array(values)
    return np.array([r.delta_model for r in results])


@dataclass(frozen=True)
class FitResult:
    """Fitted parameter values and search diagnostics."""

    gamma: float
    kappa: float
    delta_k: float
    residual: float
    iterations: int
    converged: bool


def fit_parameters(
    measurements: MeasurementSeries,
    cavity: CavityConfig,
    free: Sequence[str] = ("gamma",),
    normalization: str = "incident",
    max_evals: int = 200,
    restarts: int = 2,
) -> FitResult:
    """Fit gamma / kappa / delta_k to a measurement series.

    The cost is the weighted sum of squares over the efficiency and depletion
    curves, each weighted by the inverse of its measured maximum. gamma is
    profiled out in closed form whenever it is free; kappa and delta_k are
    searched as kappa/kappa0 and delta_k*L/pi with Nelder-Mead, restarting
    from the best point with a shrunken simplex when the first run does not
    report success.
    """
    free = tuple(free)
    if not free:
        raise ValueError("free must name at least one parameter")
    for name in free:
        if name not in _FIT_PARAMETERS:
            raise ValueError(f"unknown fit parameter {name!r}")
    if len(set(free)) != len(free):
        raise ValueError("free parameter names must be unique")
    if normalization not in _NORMALIZATION_MODES:
        raise ValueError(f"normalization must be one of {_NORMALIZATION_MODES}")

    kappa0 = cavity.crystal.kappa
    dk0 = cavity.crystal.delta_k
    length = cavity.crystal.length
    if kappa0 <= 0.0:
        raise ValueError("the template cavity must carry a positive kappa")

    unit_metrics = MetricsConfig(gamma=1.0)
    eta_meas_base = measured_efficiency(measurements, unit_metrics)
    delta_meas = measured_depletion(measurements, normalization)
    eta_scale = float(np.max(eta_meas_base))
    w_eta = 1.0 / eta_scale if eta_scale > 0.0 else 1.0
    delta_scale = float(np.max(np.abs(delta_meas)))
    w_delta = 1.0 / delta_scale if delta_scale > 0.0 else 1.0

    drives = [
        DriveConfig(input_power_signal=sig, input_power_pump=pump)
        for sig, pump in zip(measurements.pd1550_in, measurements.pump_power)
    ]
    curve_cache: dict[tuple[float, float], tuple[np.ndarray, np.ndarray]] = {}

    def model_curves(kappa: float, delta_k: float) -> tuple[np.ndarray, np.ndarray]:
        key = (kappa, delta_k)
        if key not in curve_cache:
            crystal = replace(cavity.crystal, kappa=kappa, delta_k=delta_k)
            trial = replace(cavity, crystal=crystal)
            results = solve_steady_state_batch([trial] * len(drives), drives)
            eta_model = np.array([r.eta for r in results])
            delta_model = _model_depletion(results, normalization)
            curve_cache[key] = (eta_model, delta_model)
        return curve_cache[key]

    def split_cost(kappa: float, delta_k: float) -> tuple[float, float]:
        """Returns (cost, profiled gamma) at the given nonlinear parameters."""
        eta_model, delta_model = model_curves(kappa, delta_k)
        if "gamma" in free:
            denom = float(np.sum(eta_meas_base**2))
            gamma = float(np.sum(eta_meas_base * eta_model)) / denom if denom > 0.0 else 1.0
        else:
            gamma = 1.0
        r_eta = w_eta * (gamma * eta_meas_base - eta_model)
        r_delta = w_delta * (delta_meas - delta_model)
        cost = float(np.sum(r_eta**2) + np.sum(r_delta**2))
        return cost, gamma

    search = [name for name in ("kappa", "delta_k") if name in free]
    if not search:
        cost, gamma = split_cost(kappa0, dk0)
        return FitResult(
            gamma=gamma,
            kappa=kappa0,
            delta_k=dk0,
            residual=cost,
            iterations=0,
            converged=True,
        )

    def unpack(x: np.ndarray) -> tuple[float, float]:
        values = {"kappa": kappa0, "delta_k": dk0}
        for name, xi in zip(search, x):
            if name == "kappa":
                values["kappa"] = xi * kappa0
            else:
                values["delta_k"] = xi * math.pi / length
        return values["kappa"], values["delta_k"]

    def objective(x: np.ndarray) -> float:
        kappa, delta_k = unpack(x)
        if kappa <= 0.0:
            return 1e6 * (1.0 + float(np.sum(np.abs(x))))
        cost, _ = split_cost(kappa, delta_k)
        return cost

    x0 = np.array(
        [1.0 if name == "kappa" else dk0 * length / math.pi for name in search]
    )
    spreads = (0.05, 0.02, 0.005)
    best_x = x0
    best_cost = objective(x0)
    iterations = 0
    converged = False
    for attempt in range(1 + max(0, restarts)):
        spread = spreads[min(attempt, len(spreads) - 1)]
        simplex = np.vstack([best_x] + [best_x + spread * basis for basis in np.eye(len(search))])
        res = sp_optimize.minimize(
            objective,
            best_x,
            method="Nelder-Mead",
            options={
                "maxfev": max_evals,
                "xatol": 1e-6,
                "fatol": 1e-14,
                "initial_simplex": simplex,
            },
        )
        iterations += int(res.nit)
        if res.fun < best_cost:
            best_cost = float(res.fun)
            best_x = np.asarray(res.x)
        if res.success:
            converged = True
            break
    kappa, delta_k = unpack(best_x)
    cost, gamma = split_cost(kappa, delta_k)
    return FitResult(
        gamma=gamma,
        kappa=kappa,
        delta_k=delta_k,
        residual=cost,
        iterations=iterations,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# resonator linewidth helpers


def finesse(effective_reflectivity: float) -> float:
    """Finesse of a two-mirror resonator from its roundtrip amplitude factor."""
    if not 0.0 < effective_reflectivity < 1.0:
        raise ValueError("effective_reflectivity must lie strictly between 0 and 1")
    return math.pi * math.sqrt(effective_reflectivity) / (1.0 - effective_reflectivity)


def effective_roundtrip_amplitude(cavity: CavityConfig, label: str) -> float:
    """Roundtrip amplitude survival factor sqrt(R_left R_right) e^(-alpha L)."""
    r_left = cavity.mirrors.reflectivity("left", label)
    r_right = cavity.mirrors.reflectivity("right", label)
    alpha = cavity.crystal.alpha(label)
    return math.sqrt(r_left * r_right) * math.exp(-alpha * cavity.crystal.length)


def monolithic_roundtrip_length(crystal_length: float, refractive_index: float) -> float:
    """Optical roundtrip length of a monolithic two-mirror crystal resonator."""
    if crystal_length <= 0.0:
        raise ValueError("crystal_length must be positive")
    if refractive_index < 1.0:
        raise ValueError("refractive_index must be at least 1")
    return 2.0 * refractive_index * crystal_length


def linewidth_and_fsr(roundtrip_length: float, finesse_value: float) -> tuple[float, float]:
    """Free spectral range and linewidth (Hz) from optical roundtrip length."""
    if roundtrip_length <= 0.0:
        raise ValueError("roundtrip_length must be positive")
    if finesse_value <= 0.0:
        raise ValueError("finesse_value must be positive")
    fsr = SPEED_OF_LIGHT / roundtrip_length
    return fsr, fsr / finesse_value


def roundtrip_length_for_linewidth(finesse_value: float, linewidth: float) -> float:
    """Optical roundtrip length implied by a finesse and linewidth pair."""
    if finesse_value <= 0.0 or linewidth <= 0.0:
        raise ValueError("finesse_value and linewidth must be positive")
    return SPEED_OF_LIGHT / (finesse_value * linewidth)


__all__ = [
    "CalibrationResult",
    "CouplerDesign",
    "CouplerPoint",
    "FitResult",
    "MeasurementSeries",
    "PeakEstimate",
    "SweepResult",
    "SweepRow",
    "calibrate_kappa",
    "effective_roundtrip_amplitude",
    "find_peak",
    "finesse",
    "fit_parameters",
    "format_sweep_csv",
    "generate_measurements",
    "linewidth_and_fsr",
    "measured_depletion",
    "measured_efficiency",
    "monolithic_roundtrip_length",
    "optimize_coupler",
    "read_measurements_csv",
    "read_sweep_csv",
    "roundtrip_length_for_linewidth",
    "sweep_pump",
    "write_measurements_csv",
    "write_sweep_csv",
]
