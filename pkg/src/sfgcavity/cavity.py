"""Standing-wave cavity roundtrip map and fixed-point steady-state solver.

One roundtrip applies, in order: left-coupler mixing of the external drive
with the returning intracavity fields (real unitary convention
b_circ = t a_in + r a_ret, b_out = t a_ret - r a_in), the forward crystal
pass, the right mirror (signal/pump reflect, the converted 532 nm field
mostly transmits into the output port), the backward crystal pass, and the
per-channel roundtrip phase. The forward 532 nm seed of each trip is the
previous trip's backward-generated field reflected by the left high
reflector; its small left-mirror leak is tracked as an explicit port so the
photon budget closes.

Steady states are fixed points of that map, found by iterating from the
dark cavity until the relative change of every intracavity amplitude falls
below the solver tolerance. Batches of independent parameter sets solve
either lane-by-lane with scalar arithmetic (faster below ~16 lanes) or as
stacked numpy arrays with converged lanes frozen at their own convergence
trip, so batch rows match solo runs.
"""
from __future__ import annotations

import cmath
import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import (
    ChannelSet,
    CrystalSpec,
    FieldTriple,
    MirrorSpec,
    flux_to_power,
    power_to_flux,
    standard_channels,
)
from .propagation import _pass_amplitudes, _pass_with_absorption

# Below this many lanes, looping python-complex solves beats numpy batching.
_SCALAR_BATCH_MAX = 16

_DIVERGENCE_FACTOR = 1e6


class CavityInstabilityError(RuntimeError):
    """Raised when the roundtrip iteration grows without bound."""


@dataclass(frozen=True)
class SolverSettings:
    """Fixed-point iteration controls."""

    max_roundtrips: int = 20000
    rel_tolerance: float = 1e-10
    steps_per_pass: int = 200

    def __post_init__(self) -> None:
        if self.max_roundtrips < 1:
            raise ValueError("max_roundtrips must be at least 1")
        if self.rel_tolerance <= 0.0:
            raise ValueError("rel_tolerance must be positive")
        if self.steps_per_pass < 1:
            raise ValueError("steps_per_pass must be at least 1")


@dataclass(frozen=True)
class CavityConfig:
    """Crystal, mirrors, per-channel roundtrip phases, and solver settings.

    roundtrip_phase is (signal, pump, sum) in radians applied once per
    roundtrip; 0 means that channel is held exactly on resonance.
    """

    crystal: CrystalSpec
    mirrors: MirrorSpec
    roundtrip_phase: tuple[float, float, float] = (0.0, 0.0, 0.0)
    channels: ChannelSet = field(default_factory=standard_channels)
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self) -> None:
        if len(self.roundtrip_phase) != 3:
            raise ValueError("roundtrip_phase must have one entry per channel (signal, pump, sum)")


@dataclass(frozen=True)
class DriveConfig:
    """External fields incident on the left coupler."""

    input_power_signal: float
    input_power_pump: float
    phase_signal: float = 0.0
    phase_pump: float = 0.0

    def __post_init__(self) -> None:
        if self.input_power_signal < 0.0 or self.input_power_pump < 0.0:
            raise ValueError("drive powers must be non-negative")


@dataclass(frozen=True)
class TripPorts:
    """Power leaving the cavity through each port during one trip, watts."""

    reflected_1550: float
    reflected_810: float
    transmitted_1550: float
    transmitted_810: float
    out_532: float
    leak_532_left: float


@dataclass(frozen=True)
class SteadyStateResult:
    """Converged port powers, metrics, and bookkeeping for one solve.

    eta is the photon-flux ratio of the 532 nm output over the incident
    1550 nm signal. delta_model evaluates the depletion metric on the model
    ports: delta = 1 - (P_refl + P_trans) / P_in. This equals the
    normalized-signal form of the metric because the reflected port's
    no-pump maximum (the cavity far from resonance) is the incident power
    itself, while the transmitted port's no-pump maximum comes from an
    auxiliary pump-off solve and enters as
    kappa_ratio_model = P_trans0 / P_in. With the pump off, delta_model
    therefore reports the static intracavity absorption of the signal, not
    zero. The pump-off port powers ride along for detector-relative
    normalizations. The circulating powers are those of the forward fields
    entering the crystal.
    """

    converged: bool
    roundtrips_used: int
    reflected_1550: float
    reflected_810: float
    transmitted_1550: float
    transmitted_810: float
    out_532: float
    leak_532_left: float
    circulating_1550: float
    circulating_810: float
    circulating_532: float
    absorbed_flux_1550: float
    absorbed_flux_810: float
    absorbed_flux_532: float
    eta: float
    delta_model: float
    kappa_ratio_model: float
    pump_off_reflected_1550: float
    pump_off_transmitted_1550: float


@dataclass(frozen=True)
class BudgetReport:
    """Per-channel photon-flux conservation audit of a steady state.

    For each driven channel: input flux = port fluxes + absorbed flux +
    converted flux, where the converted flux counts every 532 nm photon
    leaving the cavity (right output port and left-mirror leak) plus the
    532 nm photons absorbed inside the crystal. Residuals are relative to
    the input flux.
    """

    residual_signal: float
    residual_pump: float
    converted_flux: float
    input_flux_signal: float
    input_flux_pump: float


@dataclass
class _LaneCoeffs:
    """Scalar per-lane constants of the roundtrip map."""

    drive_s: complex
    drive_p: complex
    rls: float
    tls: float
    rlp: float
    tlp: float
    rlg: float
    tlg: float
    rrs: float
    trs: float
    rrp: float
    trp: float
    rrg: float
    trg: float
    ph_s: complex
    ph_p: complex
    ph_g: complex
    ik: complex
    ds: float
    dp: float
    dg: complex
    unfold: complex
    alphas: tuple[float, float, float]
    floor: float
    amp_scale: float


@dataclass
class _LaneRecord:
    """Raw solver output for one lane, port quantities still in flux units."""

    converged: bool
    diverged: bool
    roundtrips: int
    refl_s: float
    refl_p: float
    trans_s: float
    trans_p: float
    out_g: float
    leak_g: float
    circ_s: float
    circ_p: float
    circ_g: float
    absorbed_s: float
    absorbed_p: float
    absorbed_g: float
    in_flux_s: float
    in_flux_p: float


def _lane_coefficients(cavity: CavityConfig, drive: DriveConfig) -> _LaneCoeffs:
    crystal = cavity.crystal
    mirrors = cavity.mirrors
    channels = cavity.channels
    a_in_s = math.sqrt(power_to_flux(drive.input_power_signal, channels.signal))
    a_in_p = math.sqrt(power_to_flux(drive.input_power_pump, channels.pump))
    drive_s = a_in_s * cmath.exp(1j * drive.phase_signal)
    drive_p = a_in_p * cmath.exp(1j * drive.phase_pump)
    rls, tls = mirrors.amplitude_coefficients("left", "signal")
    rlp, tlp = mirrors.amplitude_coefficients("left", "pump")
    rlg, tlg = mirrors.amplitude_coefficients("left", "sum")
    rrs, trs = mirrors.amplitude_coefficients("right", "signal")
    rrp, trp = mirrors.amplitude_coefficients("right", "pump")
    rrg, trg = mirrors.amplitude_coefficients("right", "sum")
    ph = [cmath.exp(1j * phi) for phi in cavity.roundtrip_phase]
    amp_scale = max(abs(drive_s), abs(drive_p), 1.0)
    return _LaneCoeffs(
        drive_s=drive_s,
        drive_p=drive_p,
        rls=rls, tls=tls, rlp=rlp, tlp=tlp, rlg=rlg, tlg=tlg,
        rrs=rrs, trs=trs, rrp=rrp, trp=trp, rrg=rrg, trg=trg,
        ph_s=ph[0], ph_p=ph[1], ph_g=ph[2],
        ik=1j * crystal.kappa,
        ds=0.5 * crystal.alpha_signal,
        dp=0.5 * crystal.alpha_pump,
        dg=complex(0.5 * crystal.alpha_sum, crystal.delta_k),
        unfold=cmath.exp(1j * crystal.delta_k * crystal.length),
        alphas=(crystal.alpha_signal, crystal.alpha_pump, crystal.alpha_sum),
        floor=1e-9 * amp_scale,
        amp_scale=amp_scale,
    )


def _trip(state, c: _LaneCoeffs, h: float, steps: int):
    """One roundtrip; state and returns are (s, p, g) amplitude bundles."""
    s, p, g = state
    cs = c.tls * c.drive_s + c.rls * s
    cp = c.tlp * c.drive_p + c.rlp * p
    cg = c.rlg * g
    fs, fp, fb = _pass_amplitudes(cs, cp, cg, c.ik, c.ds, c.dp, c.dg, h, steps)
    fg = fb * c.unfold
    bs, bp, bb = _pass_amplitudes(
        c.rrs * fs, c.rrp * fp, c.rrg * fg, c.ik, c.ds, c.dp, c.dg, h, steps
    )
    bg = bb * c.unfold
    return (c.ph_s * bs, c.ph_p * bp, c.ph_g * bg)


def _trip_audited(state, c: _LaneCoeffs, h: float, steps: int):
    """One roundtrip with ports, circulating fields, and absorbed flux."""
    s, p, g = state
    cs = c.tls * c.drive_s + c.rls * s
    cp = c.tlp * c.drive_p + c.rlp * p
    refl_s = c.tls * s - c.rls * c.drive_s
    refl_p = c.tlp * p - c.rlp * c.drive_p
    cg = c.rlg * g
    leak_g = c.tlg * g
    fs, fp, fb, q1s, q1p, q1g = _pass_with_absorption(
        cs, cp, cg, c.ik, c.ds, c.dp, c.dg, c.alphas, h, steps
    )
    fg = fb * c.unfold
    trans_s = c.trs * fs
    trans_p = c.trp * fp
    out_g = c.trg * fg
    bs, bp, bb, q2s, q2p, q2g = _pass_with_absorption(
        c.rrs * fs, c.rrp * fp, c.rrg * fg, c.ik, c.ds, c.dp, c.dg, c.alphas, h, steps
    )
    bg = bb * c.unfold
    next_state = (c.ph_s * bs, c.ph_p * bp, c.ph_g * bg)
    ports = (refl_s, refl_p, trans_s, trans_p, out_g, leak_g)
    circulating = (cs, cp, cg)
    absorbed = (q1s + q2s, q1p + q2p, q1g + q2g)
    return next_state, ports, circulating, absorbed


def _abs2(x):
    return (x * x.conjugate()).real


def _record_from_audit(
    c: _LaneCoeffs, ports, circulating, absorbed, converged: bool, diverged: bool, trips: int
) -> _LaneRecord:
    refl_s, refl_p, trans_s, trans_p, out_g, leak_g = ports
    cs, cp, cg = circulating
    qs, qp, qg = absorbed
    return _LaneRecord(
        converged=converged,
        diverged=diverged,
        roundtrips=trips,
        refl_s=float(_abs2(refl_s)),
        refl_p=float(_abs2(refl_p)),
        trans_s=float(_abs2(trans_s)),
        trans_p=float(_abs2(trans_p)),
        out_g=float(_abs2(out_g)),
        leak_g=float(_abs2(leak_g)),
        circ_s=float(_abs2(cs)),
        circ_p=float(_abs2(cp)),
        circ_g=float(_abs2(cg)),
        absorbed_s=float(qs),
        absorbed_p=float(qp),
        absorbed_g=float(qg),
        in_flux_s=float(_abs2(c.drive_s)),
        in_flux_p=float(_abs2(c.drive_p)),
    )


def _solve_lane_scalar(c: _LaneCoeffs, h: float, settings: SolverSettings) -> _LaneRecord:
    tol = settings.rel_tolerance
    steps = settings.steps_per_pass
    limit = _DIVERGENCE_FACTOR * c.amp_scale
    state = (0j, 0j, 0j)
    converged = False
    diverged = False
    trips = settings.max_roundtrips
    for trip_index in range(1, settings.max_roundtrips + 1):
        new = _trip(state, c, h, steps)
        s, p, g = new
        change = max(
            abs(s - state[0]) / max(abs(s), c.floor),
            abs(p - state[1]) / max(abs(p), c.floor),
            abs(g - state[2]) / max(abs(g), c.floor),
        )
        state = new
        if max(abs(s), abs(p), abs(g)) > limit:
            diverged = True
            trips = trip_index
            break
        if change <= tol:
            converged = True
            trips = trip_index
            break
    _, ports, circulating, absorbed = _trip_audited(state, c, h, steps)
    return _record_from_audit(c, ports, circulating, absorbed, converged, diverged, trips)


def _solve_lanes_array(
    coeffs: list[_LaneCoeffs], h: float, settings: SolverSettings
) -> list[_LaneRecord]:
    n = len(coeffs)

    def stack(get, dtype):
        return np.array([get(c) for c in coeffs], dtype=dtype)

    batch = dataclasses.replace(
        coeffs[0],
        drive_s=stack(lambda c: c.drive_s, complex),
        drive_p=stack(lambda c: c.drive_p, complex),
        rls=stack(lambda c: c.rls, float), tls=stack(lambda c: c.tls, float),
        rlp=stack(lambda c: c.rlp, float), tlp=stack(lambda c: c.tlp, float),
        rlg=stack(lambda c: c.rlg, float), tlg=stack(lambda c: c.tlg, float),
        rrs=stack(lambda c: c.rrs, float), trs=stack(lambda c: c.trs, float),
        rrp=stack(lambda c: c.rrp, float), trp=stack(lambda c: c.trp, float),
        rrg=stack(lambda c: c.rrg, float), trg=stack(lambda c: c.trg, float),
        ph_s=stack(lambda c: c.ph_s, complex),
        ph_p=stack(lambda c: c.ph_p, complex),
        ph_g=stack(lambda c: c.ph_g, complex),
        ik=stack(lambda c: c.ik, complex),
        ds=stack(lambda c: c.ds, float),
        dp=stack(lambda c: c.dp, float),
        dg=stack(lambda c: c.dg, complex),
        unfold=stack(lambda c: c.unfold, complex),
        alphas=tuple(
            stack(lambda c, i=i: c.alphas[i], float) for i in range(3)
        ),
        floor=stack(lambda c: c.floor, float),
        amp_scale=stack(lambda c: c.amp_scale, float),
    )
    tol = settings.rel_tolerance
    steps = settings.steps_per_pass
    limit = _DIVERGENCE_FACTOR * batch.amp_scale
    zeros = np.zeros(n, dtype=complex)
    state = (zeros.copy(), zeros.copy(), zeros.copy())
    done = np.zeros(n, dtype=bool)
    diverged = np.zeros(n, dtype=bool)
    trips = np.full(n, settings.max_roundtrips, dtype=int)
    for trip_index in range(1, settings.max_roundtrips + 1):
        new = _trip(state, batch, h, steps)
        s, p, g = new
        change = np.maximum(
            np.abs(s - state[0]) / np.maximum(np.abs(s), batch.floor),
            np.maximum(
                np.abs(p - state[1]) / np.maximum(np.abs(p), batch.floor),
                np.abs(g - state[2]) / np.maximum(np.abs(g), batch.floor),
            ),
        )
        blown = (
            np.maximum(np.abs(s), np.maximum(np.abs(p), np.abs(g))) > limit
        ) & ~done
        newly = ((change <= tol) | blown) & ~done
        # frozen lanes keep their converged state so batch rows equal solo runs
        keep = done
        state = (
            np.where(keep, state[0], s),
            np.where(keep, state[1], p),
            np.where(keep, state[2], g),
        )
        trips[newly] = trip_index
        diverged |= blown
        done |= newly
        if done.all():
            break
    _, ports, circulating, absorbed = _trip_audited(state, batch, h, steps)
    records = []
    converged_mask = done & ~diverged
    for i in range(n):
        records.append(
            _record_from_audit(
                coeffs[i],
                tuple(arr[i] for arr in ports),
                tuple(arr[i] for arr in circulating),
                tuple(arr[i] for arr in absorbed),
                bool(converged_mask[i]),
                bool(diverged[i]),
                int(trips[i]),
            )
        )
    return records


def _solve_lanes(
    cavities: Sequence[CavityConfig], drives: Sequence[DriveConfig]
) -> list[_LaneRecord]:
    settings = cavities[0].solver
    length = cavities[0].crystal.length
    for cavity in cavities:
        if cavity.solver != settings:
            raise ValueError("all lanes of a batch must share solver settings")
        if cavity.crystal.length != length:
            raise ValueError("all lanes of a batch must share the crystal length")
    h = length / settings.steps_per_pass
    coeffs = [_lane_coefficients(cav, drv) for cav, drv in zip(cavities, drives)]
    if len(coeffs) <= _SCALAR_BATCH_MAX:
        return [_solve_lane_scalar(c, h, settings) for c in coeffs]
    return _solve_lanes_array(coeffs, h, settings)


def _assemble_result(
    record: _LaneRecord, aux: _LaneRecord | None, channels: ChannelSet
) -> SteadyStateResult:
    # for a pump-off lane the record is its own pump-off baseline
    baseline = aux if aux is not None else record
    if record.in_flux_s > 0.0:
        eta = record.out_g / record.in_flux_s
        # the reflection's no-pump maximum is the incident power (cavity far
        # from resonance), so the depletion normalizes the port sum to it
        delta = 1.0 - (record.refl_s + record.trans_s) / record.in_flux_s
        kappa_ratio = baseline.trans_s / record.in_flux_s
        off_refl = baseline.refl_s
        off_trans = baseline.trans_s
    else:
        eta = 0.0
        delta = 0.0
        kappa_ratio = 0.0
        off_refl = 0.0
        off_trans = 0.0
    if record.diverged:
        eta = float("nan")
        delta = float("nan")
    return SteadyStateResult(
        converged=record.converged,
        roundtrips_used=record.roundtrips,
        reflected_1550=flux_to_power(record.refl_s, channels.signal),
        reflected_810=flux_to_power(record.refl_p, channels.pump),
        transmitted_1550=flux_to_power(record.trans_s, channels.signal),
        transmitted_810=flux_to_power(record.trans_p, channels.pump),
        out_532=flux_to_power(record.out_g, channels.sum),
        leak_532_left=flux_to_power(record.leak_g, channels.sum),
        circulating_1550=flux_to_power(record.circ_s, channels.signal),
        circulating_810=flux_to_power(record.circ_p, channels.pump),
        circulating_532=flux_to_power(record.circ_g, channels.sum),
        absorbed_flux_1550=record.absorbed_s,
        absorbed_flux_810=record.absorbed_p,
        absorbed_flux_532=record.absorbed_g,
        eta=eta,
        delta_model=delta,
        kappa_ratio_model=kappa_ratio,
        pump_off_reflected_1550=flux_to_power(off_refl, channels.signal),
        pump_off_transmitted_1550=flux_to_power(off_trans, channels.signal),
    )


def solve_steady_state_batch(
    cavities: Sequence[CavityConfig], drives: Sequence[DriveConfig]
) -> list[SteadyStateResult]:
    """Solve many independent (cavity, drive) lanes in one batched run.

    Lanes may differ in drive and in crystal/mirror parameters but must
    share solver settings and crystal length. One auxiliary pump-off lane
    per distinct (cavity, signal power) pair is appended automatically to
    supply the pump-off port maxima (kappa_ratio_model and the baselines for
    detector-relative depletion). Diverged lanes are reported with
    converged=False and NaN metrics rather than raising.
    """
    if len(cavities) != len(drives):
        raise ValueError("cavities and drives must have equal length")
    if not cavities:
        return []
    aux_keys: list[tuple[CavityConfig, float]] = []
    aux_index: dict[tuple[CavityConfig, float], int] = {}
    for cavity, drive in zip(cavities, drives):
        if drive.input_power_pump <= 0.0 or drive.input_power_signal <= 0.0:
            continue
        key = (cavity, drive.input_power_signal)
        if key not in aux_index:
            aux_index[key] = len(cavities) + len(aux_keys)
            aux_keys.append(key)
    all_cavities = list(cavities) + [key[0] for key in aux_keys]
    all_drives = list(drives) + [
        DriveConfig(input_power_signal=key[1], input_power_pump=0.0) for key in aux_keys
    ]
    records = _solve_lanes(all_cavities, all_drives)
    results = []
    for i, (cavity, drive) in enumerate(zip(cavities, drives)):
        key = (cavity, drive.input_power_signal)
        aux = records[aux_index[key]] if key in aux_index else None
        if drive.input_power_pump <= 0.0 or drive.input_power_signal <= 0.0:
            aux = None
        results.append(_assemble_result(records[i], aux, cavity.channels))
    return results


def solve_steady_state(cavity: CavityConfig, drive: DriveConfig) -> SteadyStateResult:
    """Iterate the roundtrip map from the dark cavity to its fixed point.

    Convergence requires the relative change of every intracavity amplitude
    over one trip to fall below solver.rel_tolerance (dark channels are
    guarded by a small amplitude floor). Unbounded growth raises
    CavityInstabilityError; running out of roundtrips returns a result with
    converged=False.
    """
    result = solve_steady_state_batch([cavity], [drive])[0]
    if math.isnan(result.eta):
        raise CavityInstabilityError(
            f"intracavity amplitude exceeded {_DIVERGENCE_FACTOR:.0e} times the drive scale"
        )
    return result


def _check_finite(stage: str, *values) -> None:
    for value in values:
        z = complex(value)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise FloatingPointError(f"non-finite amplitude after stage: {stage}")


def roundtrip_map(
    state: FieldTriple, cavity: CavityConfig, drive: DriveConfig
) -> tuple[FieldTriple, TripPorts]:
    """Apply one documented cavity roundtrip to a field state.

    Returns the next state at the reference plane (fields arriving back at
    the left coupler) and the port powers emitted during the trip. Stages
    are checked for finiteness and named in any numeric error.
    """
    c = _lane_coefficients(cavity, drive)
    settings = cavity.solver
    h = cavity.crystal.length / settings.steps_per_pass
    steps = settings.steps_per_pass
    s, p, g = (complex(a) for a in state.as_tuple())
    _check_finite("input state", s, p, g)
    cs = c.tls * c.drive_s + c.rls * s
    cp = c.tlp * c.drive_p + c.rlp * p
    refl_s = c.tls * s - c.rls * c.drive_s
    refl_p = c.tlp * p - c.rlp * c.drive_p
    cg = c.rlg * g
    leak_g = c.tlg * g
    _check_finite("left-coupler mixing", cs, cp, cg, refl_s, refl_p)
    fs, fp, fb = _pass_amplitudes(cs, cp, cg, c.ik, c.ds, c.dp, c.dg, h, steps)
    fg = fb * c.unfold
    _check_finite("forward crystal pass", fs, fp, fg)
    trans_s = c.trs * fs
    trans_p = c.trp * fp
    out_g = c.trg * fg
    _check_finite("right mirror", trans_s, trans_p, out_g)
    bs, bp, bb = _pass_amplitudes(
        c.rrs * fs, c.rrp * fp, c.rrg * fg, c.ik, c.ds, c.dp, c.dg, h, steps
    )
    bg = bb * c.unfold
    _check_finite("backward crystal pass", bs, bp, bg)
    next_state = FieldTriple(
        a_signal=c.ph_s * bs, a_pump=c.ph_p * bp, a_sum=c.ph_g * bg
    )
    channels = cavity.channels
    ports = TripPorts(
        reflected_1550=flux_to_power(_abs2(refl_s), channels.signal),
        reflected_810=flux_to_power(_abs2(refl_p), channels.pump),
        transmitted_1550=flux_to_power(_abs2(trans_s), channels.signal),
        transmitted_810=flux_to_power(_abs2(trans_p), channels.pump),
        out_532=flux_to_power(_abs2(out_g), channels.sum),
        leak_532_left=flux_to_power(_abs2(leak_g), channels.sum),
    )
    return next_state, ports


def photon_budget(
    result: SteadyStateResult, drive: DriveConfig, channels: ChannelSet | None = None
) -> BudgetReport:
    """Audit photon-number conservation of a steady state.

    Every incident signal photon must reappear at the reflection or
    transmission port, be absorbed, or be converted; likewise for the pump.
    The converted flux counts all 532 nm exits (right port plus left leak)
    and 532 nm absorption. Residuals are relative to the channel's input
    flux (absolute for an undriven channel).
    """
    if channels is None:
        channels = standard_channels()
    converted = (
        power_to_flux(result.out_532, channels.sum)
        + power_to_flux(result.leak_532_left, channels.sum)
        + result.absorbed_flux_532
    )
    in_s = power_to_flux(drive.input_power_signal, channels.signal)
    in_p = power_to_flux(drive.input_power_pump, channels.pump)
    out_s = (
        power_to_flux(result.reflected_1550, channels.signal)
        + power_to_flux(result.transmitted_1550, channels.signal)
        + result.absorbed_flux_1550
        + converted
    )
    out_p = (
        power_to_flux(result.reflected_810, channels.pump)
        + power_to_flux(result.transmitted_810, channels.pump)
        + result.absorbed_flux_810
        + converted
    )
    residual_s = (in_s - out_s) / in_s if in_s > 0.0 else abs(out_s)
    residual_p = (in_p - out_p) / in_p if in_p > 0.0 else abs(out_p)
    return BudgetReport(
        residual_signal=residual_s,
        residual_pump=residual_p,
        converted_flux=converted,
        input_flux_signal=in_s,
        input_flux_pump=in_p,
    )


__all__ = [
    "BudgetReport",
    "CavityConfig",
    "CavityInstabilityError",
    "DriveConfig",
    "SolverSettings",
    "SteadyStateResult",
    "TripPorts",
    "photon_budget",
    "roundtrip_map",
    "solve_steady_state",
    "solve_steady_state_batch",
]
