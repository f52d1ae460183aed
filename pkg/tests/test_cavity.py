"""Cavity solver tests: linear-cavity oracles, batching, conservation, errors."""
import dataclasses
import math

import pytest

import sfgcavity as sc
from sfgcavity import DriveConfig, FieldTriple, SolverSettings
from sfgcavity.cavity import roundtrip_map

from conftest import FAST_SETTINGS

SIGNAL_POWER = 2e-3
PEAK_PUMP = 81.5e-3


@pytest.fixture(scope="module")
def pump_off_result(reference_cavity):
    """Full-fidelity pump-off steady state: the cavity is exactly linear."""
    return sc.solve_steady_state(reference_cavity, DriveConfig(SIGNAL_POWER, 0.0))


def _signal_airy_factors(cavity):
    """Amplitude factors of the linear signal cavity used by the oracles."""
    mirrors = cavity.mirrors
    alpha_l = cavity.crystal.alpha_signal * cavity.crystal.length
    r1 = math.sqrt(mirrors.left_signal)
    t1 = math.sqrt(1.0 - mirrors.left_signal)
    r2 = math.sqrt(mirrors.right_signal)
    t2 = math.sqrt(1.0 - mirrors.right_signal)
    r_eff = r1 * r2 * math.exp(-alpha_l)
    return r1, t1, r2, t2, alpha_l, r_eff


def test_pump_off_matches_airy_formulas(reference_cavity, pump_off_result):
    # with the pump off the signal cavity is a textbook two-mirror resonator;
    # circulating, reflected, and transmitted fractions all have closed forms
    result = pump_off_result
    r1, t1, r2, t2, alpha_l, r_eff = _signal_airy_factors(reference_cavity)
    circ = t1 ** 2 / (1.0 - r_eff) ** 2
    assert result.circulating_1550 / SIGNAL_POWER == pytest.approx(circ, rel=1e-6)
    cs = t1 / (1.0 - r_eff)
    returning = r2 * math.exp(-alpha_l) * cs
    refl = (t1 * returning - r1) ** 2
    trans = (t2 * math.exp(-0.5 * alpha_l) * cs) ** 2
    assert result.reflected_1550 / SIGNAL_POWER == pytest.approx(refl, rel=1e-6)
    assert result.transmitted_1550 / SIGNAL_POWER == pytest.approx(trans, rel=1e-6)
    # no pump, no conversion: the 532 ports stay dark, the depletion reduces
    # to the static absorbed fraction, and the pump-off baselines are the
    # solve's own ports
    assert result.converged
    assert result.eta == 0.0
    assert result.delta_model == pytest.approx(1.0 - refl - trans, rel=1e-6)
    assert result.delta_model > 0.0
    assert result.out_532 == 0.0
    assert result.kappa_ratio_model == pytest.approx(trans, rel=1e-6)
    assert result.pump_off_reflected_1550 == result.reflected_1550
    assert result.pump_off_transmitted_1550 == result.transmitted_1550


def test_detuned_buildup(fast_cavity):
    # a nonzero signal roundtrip phase detunes the resonance; the Airy
    # denominator picks up the phase term
    detuned = dataclasses.replace(fast_cavity, roundtrip_phase=(0.5, 0.0, 0.0))
    result = sc.solve_steady_state(detuned, DriveConfig(SIGNAL_POWER, 0.0))
    r1, t1, r2, t2, alpha_l, r_eff = _signal_airy_factors(detuned)
    denominator = 1.0 - 2.0 * r_eff * math.cos(0.5) + r_eff ** 2
    expected = t1 ** 2 / denominator
    assert result.circulating_1550 / SIGNAL_POWER == pytest.approx(expected, rel=1e-6)
    assert expected < 1.0  # far off resonance the buildup collapses


def test_dark_state_roundtrip_reflection(fast_cavity):
    # first trip from the dark state: the reflection port sees only the
    # directly reflected drive, so its power is R_left * P_in exactly
    drive = sc.reference_drive(PEAK_PUMP)
    state, ports = roundtrip_map(FieldTriple(0.0, 0.0, 0.0), fast_cavity, drive)
    assert ports.reflected_1550 == pytest.approx(0.965 * SIGNAL_POWER, rel=1e-12)
    assert ports.reflected_810 == pytest.approx(0.965 * PEAK_PUMP, rel=1e-12)
    # the injected fields cross the crystal once, so transmission and
    # conversion are already nonzero after a single trip
    assert ports.transmitted_1550 > 0.0
    assert ports.out_532 > 0.0
    assert abs(state.a_signal) > 0.0


def test_roundtrip_map_stage_names(fast_cavity):
    drive = sc.reference_drive(PEAK_PUMP)
    with pytest.raises(FloatingPointError, match="input state"):
        roundtrip_map(FieldTriple(complex("inf"), 0.0, 0.0), fast_cavity, drive)
    runaway = dataclasses.replace(
        fast_cavity, crystal=dataclasses.replace(fast_cavity.crystal, kappa=1.0)
    )
    with pytest.raises(FloatingPointError, match="forward crystal pass"):
        roundtrip_map(FieldTriple(0.0, 0.0, 0.0), runaway, drive)


def test_divergence_raises(fast_cavity):
    runaway = dataclasses.replace(
        fast_cavity,
        crystal=dataclasses.replace(fast_cavity.crystal, kappa=1.0),
        solver=SolverSettings(max_roundtrips=50, rel_tolerance=1e-10, steps_per_pass=50),
    )
    with pytest.raises(sc.CavityInstabilityError, match="amplitude"):
        sc.solve_steady_state(runaway, sc.reference_drive(PEAK_PUMP))


def test_unconverged_is_flagged_not_raised(fast_cavity):
    limited = dataclasses.replace(
        fast_cavity,
        solver=SolverSettings(max_roundtrips=5, rel_tolerance=1e-10, steps_per_pass=50),
    )
    result = sc.solve_steady_state(limited, sc.reference_drive(PEAK_PUMP))
    assert not result.converged
    assert result.roundtrips_used == 5
    assert math.isfinite(result.eta)


def test_batch_matches_solo_scalar_path(fast_cavity):
    # small batches run the per-lane scalar solver; results must agree with
    # independent solves to roundoff
    drives = [sc.reference_drive(p) for p in (20e-3, PEAK_PUMP, 150e-3)]
    batch = sc.solve_steady_state_batch([fast_cavity] * 3, drives)
    for drive, from_batch in zip(drives, batch):
        solo = sc.solve_steady_state(fast_cavity, drive)
        assert from_batch.eta == pytest.approx(solo.eta, rel=1e-14)
        assert from_batch.delta_model == pytest.approx(solo.delta_model, rel=1e-14)
        assert from_batch.roundtrips_used == solo.roundtrips_used


def test_batch_matches_solo_array_path(fast_cavity):
    # 18 lanes with different mirrors and drives force the vectorized driver;
    # lanes freeze at their own convergence trip, so per-lane trip counts and
    # ports must still match the scalar solves
    cavities, drives = [], []
    for i in range(18):
        mirrors = dataclasses.replace(fast_cavity.mirrors, left_signal=0.90 + 0.004 * i)
        cavities.append(dataclasses.replace(fast_cavity, mirrors=mirrors))
        drives.append(DriveConfig(SIGNAL_POWER, (20 + 8 * i) * 1e-3))
    batch = sc.solve_steady_state_batch(cavities, drives)
    assert all(r.converged for r in batch)
    for cavity, drive, from_batch in zip(cavities, drives, batch):
        solo = sc.solve_steady_state(cavity, drive)
        assert from_batch.roundtrips_used == solo.roundtrips_used
        assert from_batch.eta == pytest.approx(solo.eta, rel=1e-12)
        assert from_batch.reflected_1550 == pytest.approx(solo.reflected_1550, rel=1e-12)
        assert from_batch.delta_model == pytest.approx(solo.delta_model, rel=1e-12)


def test_photon_budget_closes(fast_cavity, pump_off_result, lossless_result):
    # full-fidelity solves close the photon ledger to well under 1e-6;
    # the fast solver's looser fixed-point tolerance dominates its residual
    drive = sc.reference_drive(PEAK_PUMP)
    fast = sc.photon_budget(sc.solve_steady_state(fast_cavity, drive), drive)
    assert abs(fast.residual_signal) < 2e-6
    assert abs(fast.residual_pump) < 2e-6
    assert fast.converted_flux > 0.0
    off = sc.photon_budget(pump_off_result, DriveConfig(SIGNAL_POWER, 0.0))
    assert abs(off.residual_signal) < 1e-6
    assert abs(off.residual_pump) < 1e-6  # absolute: pump channel undriven
    lossless = sc.photon_budget(lossless_result, drive)
    assert abs(lossless.residual_signal) < 1e-6
    assert abs(lossless.residual_pump) < 1e-6


def test_depletion_bounds_efficiency(fast_cavity, lossless_result):
    # photons missing from the signal ports were converted or absorbed, so
    # the depletion can only exceed the conversion efficiency; without any
    # absorption and with free 532 extraction the two must coincide
    lossy = sc.solve_steady_state(fast_cavity, sc.reference_drive(PEAK_PUMP))
    assert lossy.converged
    assert lossy.delta_model >= lossy.eta
    assert lossless_result.converged
    assert abs(lossless_result.delta_model - lossless_result.eta) <= 1e-6
    assert lossless_result.eta > 0.8


def test_batch_validation(fast_cavity, reference_cavity):
    drive = sc.reference_drive(PEAK_PUMP)
    with pytest.raises(ValueError, match="solver settings"):
        sc.solve_steady_state_batch([fast_cavity, reference_cavity], [drive, drive])
    short = dataclasses.replace(
        fast_cavity, crystal=dataclasses.replace(fast_cavity.crystal, length=5e-3)
    )
    with pytest.raises(ValueError, match="crystal length"):
        sc.solve_steady_state_batch([fast_cavity, short], [drive, drive])
    with pytest.raises(ValueError, match="equal length"):
        sc.solve_steady_state_batch([fast_cavity], [drive, drive])
    assert sc.solve_steady_state_batch([], []) == []


def test_config_validation():
    with pytest.raises(ValueError, match="non-negative"):
        DriveConfig(-1e-3, 0.0)
    with pytest.raises(ValueError, match="max_roundtrips"):
        SolverSettings(max_roundtrips=0)
    with pytest.raises(ValueError, match="rel_tolerance"):
        SolverSettings(rel_tolerance=0.0)
    with pytest.raises(ValueError, match="steps_per_pass"):
        SolverSettings(steps_per_pass=0)
    with pytest.raises(ValueError, match="roundtrip_phase"):
        sc.CavityConfig(
            crystal=sc.reference_crystal(),
            mirrors=sc.reference_mirrors(),
            roundtrip_phase=(0.0, 0.0),
        )
