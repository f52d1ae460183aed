"""Bundled reference configuration of the measured upconversion cavity.

The numbers below describe a 9.3 mm monolithic crystal resonator that
upconverts a 2 mW telecom-band signal with a strong 810 nm pump. Coupling
strength and residual phase mismatch are not directly measurable; the values
bundled here were calibrated against the measured efficiency curve (peak at
81.5 mW pump, maximum efficiency near 85%) and are what the sweep, design,
and fit demonstrations start from.
"""
from __future__ import annotations

from .cavity import CavityConfig, DriveConfig, SolverSettings
from .model import CrystalSpec, MetricsConfig, MirrorSpec, standard_channels

REFERENCE_CRYSTAL_LENGTH = 9.3e-3
# absorption in 1/m (a value quoted in %/cm is numerically equal)
REFERENCE_ALPHA_SIGNAL = 0.19
REFERENCE_ALPHA_PUMP = 0.46
REFERENCE_ALPHA_SUM = 0.0
# calibrated so the efficiency peak sits at the measured 81.5 mW pump power
REFERENCE_KAPPA = 2.627828885e-9
# residual phase mismatch fitted to the measured peak efficiency
REFERENCE_DELTA_K = 240.0

REFERENCE_LEFT_SIGNAL = 0.965
REFERENCE_LEFT_PUMP = 0.965
REFERENCE_LEFT_SUM = 0.999
REFERENCE_RIGHT_SIGNAL = 0.999
REFERENCE_RIGHT_PUMP = 0.999
REFERENCE_RIGHT_SUM = 0.001

REFERENCE_SIGNAL_POWER = 2e-3
REFERENCE_PEAK_PUMP = 81.5e-3
REFERENCE_PUMP_BUDGET = 0.200
DESIGN_SIGNAL_REFLECTIVITY = 0.90

REFERENCE_GAMMA = 1.0337


def reference_crystal() -> CrystalSpec:
    """Crystal of the reference device with calibrated coupling."""
    return CrystalSpec(
        length=REFERENCE_CRYSTAL_LENGTH,
        alpha_signal=REFERENCE_ALPHA_SIGNAL,
        alpha_pump=REFERENCE_ALPHA_PUMP,
        alpha_sum=REFERENCE_ALPHA_SUM,
        kappa=REFERENCE_KAPPA,
        delta_k=REFERENCE_DELTA_K,
    )


def reference_mirrors() -> MirrorSpec:
    """Mirror coatings of the reference device."""
    return MirrorSpec(
        left_signal=REFERENCE_LEFT_SIGNAL,
        left_pump=REFERENCE_LEFT_PUMP,
        left_sum=REFERENCE_LEFT_SUM,
        right_signal=REFERENCE_RIGHT_SIGNAL,
        right_pump=REFERENCE_RIGHT_PUMP,
        right_sum=REFERENCE_RIGHT_SUM,
    )


def reference_config(solver: SolverSettings | None = None) -> CavityConfig:
    """Full reference cavity, all channels held on resonance."""
    return CavityConfig(
        crystal=reference_crystal(),
        mirrors=reference_mirrors(),
        roundtrip_phase=(0.0, 0.0, 0.0),
        channels=standard_channels(),
        solver=solver if solver is not None else SolverSettings(),
    )


def reference_drive(pump_power: float) -> DriveConfig:
    """Drive with the reference 2 mW signal and the given pump power."""
    return DriveConfig(
        input_power_signal=REFERENCE_SIGNAL_POWER, input_power_pump=pump_power
    )


def reference_metrics() -> MetricsConfig:
    """Detector calibration fitted for the reference measurement series."""
    return MetricsConfig(gamma=REFERENCE_GAMMA)


__all__ = [
    "DESIGN_SIGNAL_REFLECTIVITY",
    "REFERENCE_ALPHA_PUMP",
    "REFERENCE_ALPHA_SIGNAL",
    "REFERENCE_ALPHA_SUM",
    "REFERENCE_CRYSTAL_LENGTH",
    "REFERENCE_DELTA_K",
    "REFERENCE_GAMMA",
    "REFERENCE_KAPPA",
    "REFERENCE_LEFT_PUMP",
    "REFERENCE_LEFT_SIGNAL",
    "REFERENCE_LEFT_SUM",
    "REFERENCE_PEAK_PUMP",
    "REFERENCE_PUMP_BUDGET",
    "REFERENCE_RIGHT_PUMP",
    "REFERENCE_RIGHT_SIGNAL",
    "REFERENCE_RIGHT_SUM",
    "REFERENCE_SIGNAL_POWER",
    "reference_config",
    "reference_crystal",
    "reference_drive",
    "reference_metrics",
    "reference_mirrors",
]
