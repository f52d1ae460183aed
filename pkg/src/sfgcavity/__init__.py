"""Cavity-enhanced sum-frequency conversion: simulator and design toolkit.

Models a doubly resonant standing-wave cavity that upconverts a weak
1550 nm signal to 532 nm using a strong 810 nm pump inside a nonlinear
crystal. The package covers single-pass coupled-mode propagation, the
cavity roundtrip steady state, pump sweeps and peak calibration, coupler
reflectivity design, detector-calibration fitting, and resonator linewidth
bookkeeping, plus a deterministic command-line front end.
"""
from .analysis import (
    MEASUREMENT_CSV_HEADER,
    SWEEP_CSV_HEADER,
    CalibrationResult,
    CouplerDesign,
    CouplerPoint,
    FitResult,
    MeasurementSeries,
    PeakEstimate,
    SweepResult,
    SweepRow,
    calibrate_kappa,
    effective_roundtrip_amplitude,
    find_peak,
    finesse,
    fit_parameters,
    format_sweep_csv,
    generate_measurements,
    linewidth_and_fsr,
    measured_depletion,
    measured_efficiency,
    monolithic_roundtrip_length,
    optimize_coupler,
    read_measurements_csv,
    read_sweep_csv,
    roundtrip_length_for_linewidth,
    sweep_pump,
    write_measurements_csv,
    write_sweep_csv,
)
from .cavity import (
    BudgetReport,
    CavityConfig,
    CavityInstabilityError,
    DriveConfig,
    SolverSettings,
    SteadyStateResult,
    TripPorts,
    photon_budget,
    roundtrip_map,
    solve_steady_state,
    solve_steady_state_batch,
)
from .model import (
    ChannelSet,
    CrystalSpec,
    FieldTriple,
    MetricsConfig,
    MirrorSpec,
    WavelengthChannel,
    conversion_efficiency,
    flux_to_power,
    power_to_flux,
    relative_depletion,
    standard_channels,
)
from .propagation import PassResult, integrate_pass, undepleted_pump_solution
from .presets import (
    DESIGN_SIGNAL_REFLECTIVITY,
    REFERENCE_DELTA_K,
    REFERENCE_GAMMA,
    REFERENCE_KAPPA,
    REFERENCE_PEAK_PUMP,
    REFERENCE_PUMP_BUDGET,
    REFERENCE_SIGNAL_POWER,
    reference_config,
    reference_crystal,
    reference_drive,
    reference_metrics,
    reference_mirrors,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetReport",
    "CalibrationResult",
    "CavityConfig",
    "CavityInstabilityError",
    "ChannelSet",
    "CouplerDesign",
    "CouplerPoint",
    "CrystalSpec",
    "DESIGN_SIGNAL_REFLECTIVITY",
    "DriveConfig",
    "FieldTriple",
    "FitResult",
    "MEASUREMENT_CSV_HEADER",
    "MeasurementSeries",
    "MetricsConfig",
    "MirrorSpec",
    "PassResult",
    "PeakEstimate",
    "REFERENCE_DELTA_K",
    "REFERENCE_GAMMA",
    "REFERENCE_KAPPA",
    "REFERENCE_PEAK_PUMP",
    "REFERENCE_PUMP_BUDGET",
    "REFERENCE_SIGNAL_POWER",
    "SWEEP_CSV_HEADER",
    "SolverSettings",
    "SteadyStateResult",
    "SweepResult",
    "SweepRow",
    "TripPorts",
    "WavelengthChannel",
    "calibrate_kappa",
    "conversion_efficiency",
    "effective_roundtrip_amplitude",
    "find_peak",
    "finesse",
    "fit_parameters",
    "flux_to_power",
    "format_sweep_csv",
    "generate_measurements",
    "integrate_pass",
    "linewidth_and_fsr",
    "measured_depletion",
    "measured_efficiency",
    "monolithic_roundtrip_length",
    "optimize_coupler",
    "photon_budget",
    "power_to_flux",
    "read_measurements_csv",
    "read_sweep_csv",
    "reference_config",
    "reference_crystal",
    "reference_drive",
    "reference_metrics",
    "reference_mirrors",
    "relative_depletion",
    "roundtrip_length_for_linewidth",
    "roundtrip_map",
    "solve_steady_state",
    "solve_steady_state_batch",
    "standard_channels",
    "sweep_pump",
    "undepleted_pump_solution",
    "write_measurements_csv",
    "write_sweep_csv",
]
