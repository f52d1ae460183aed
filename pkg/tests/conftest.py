"""Shared fixtures: reference cavity, fast solver variants, synthetic data."""
import time

import numpy as np
import pytest

import sfgcavity as sc

# acceptance checks run at full solver fidelity; functional tests use the
# fast settings, which keep the same physics at lower integrator resolution
FAST_SETTINGS = sc.SolverSettings(steps_per_pass=50, rel_tolerance=1e-8)


@pytest.fixture(scope="session")
def reference_cavity():
    return sc.reference_config()


@pytest.fixture(scope="session")
def fast_cavity():
    return sc.reference_config(FAST_SETTINGS)


@pytest.fixture(scope="session")
def lossless_cavity():
    """All absorption off, green extraction lossless: delta must equal eta."""
    crystal = sc.CrystalSpec(
        length=9.3e-3,
        alpha_signal=0.0,
        alpha_pump=0.0,
        alpha_sum=0.0,
        kappa=sc.REFERENCE_KAPPA,
        delta_k=sc.REFERENCE_DELTA_K,
    )
    mirrors = sc.MirrorSpec(
        left_signal=0.965,
        left_pump=0.965,
        left_sum=1.0,
        right_signal=0.999,
        right_pump=0.999,
        right_sum=0.0,
    )
    return sc.CavityConfig(crystal=crystal, mirrors=mirrors)


@pytest.fixture(scope="session")
def lossless_result(lossless_cavity):
    """Full-fidelity steady state of the lossless cavity at the peak pump."""
    return sc.solve_steady_state(lossless_cavity, sc.reference_drive(81.5e-3))


@pytest.fixture(scope="session")
def acceptance_sweep(reference_cavity):
    """25-point full-fidelity pump sweep of the bundled config, timed."""
    grid = np.linspace(0.0, 0.190, 25)
    start = time.perf_counter()
    sweep = sc.sweep_pump(reference_cavity, sc.REFERENCE_SIGNAL_POWER, grid)
    elapsed = time.perf_counter() - start
    return sweep, elapsed


@pytest.fixture(scope="session")
def fit_series(fast_cavity):
    """Synthetic measurement series with the reference detector calibration."""
    pumps = [0.0, 20e-3, 50e-3, 81.5e-3, 120e-3, 160e-3]
    return sc.generate_measurements(
        fast_cavity,
        signal_power=sc.REFERENCE_SIGNAL_POWER,
        pump_powers=pumps,
        metrics=sc.MetricsConfig(gamma=sc.REFERENCE_GAMMA),
    )
