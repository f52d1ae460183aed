"""Shared unit conventions, domain types, and the two detector-side metrics.

All field amplitudes are photon-flux normalized: |a|^2 is a photon rate in
photons/second, so photon-number bookkeeping (Manley-Rowe sums, conversion
efficiency as a flux ratio) is direct. Powers are watts, lengths meters,
absorption coefficients 1/meter.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Final

PLANCK_CONSTANT: Final[float] = 6.62607015e-34  # J s, exact (SI 2019)
SPEED_OF_LIGHT: Final[float] = 299792458.0  # m/s, exact

# Integer nanometer labels used in the efficiency ratio; the metric is defined
# with these round values, not high-precision vacuum wavelengths.
SIGNAL_NM: Final[float] = 1550.0
SUM_NM: Final[float] = 532.0

CHANNEL_LABELS: Final[tuple[str, ...]] = ("signal", "pump", "sum")
MIRROR_SIDES: Final[tuple[str, ...]] = ("left", "right")


@dataclass(frozen=True)
class WavelengthChannel:
    """One interacting wave: its label, vacuum wavelength, and crystal index."""

    label: str
    vacuum_wavelength: float
    refractive_index: float

    def __post_init__(self) -> None:
        if self.label not in CHANNEL_LABELS:
            raise ValueError(f"channel label must be one of {CHANNEL_LABELS}, got {self.label!r}")
        if self.vacuum_wavelength <= 0.0:
            raise ValueError("vacuum_wavelength must be positive")
        if self.refractive_index <= 1.0:
            raise ValueError("refractive_index must exceed 1")

    @property
    def photon_energy(self) -> float:
        """Energy of one photon at this wavelength, joules."""
        return PLANCK_CONSTANT * SPEED_OF_LIGHT / self.vacuum_wavelength


@dataclass(frozen=True)
class ChannelSet:
    """The three interacting channels of one up-conversion process."""

    signal: WavelengthChannel
    pump: WavelengthChannel
    sum: WavelengthChannel

    def __post_init__(self) -> None:
        # photon energy conservation: 1/lambda_sum = 1/lambda_signal + 1/lambda_pump
        inv_sum = 1.0 / self.sum.vacuum_wavelength
        inv_parts = 1.0 / self.signal.vacuum_wavelength + 1.0 / self.pump.vacuum_wavelength
        if abs(inv_sum - inv_parts) > 1e-3 * inv_sum:
            raise ValueError(
                "wavelengths violate photon energy conservation: "
                f"1/{self.sum.vacuum_wavelength} != 1/{self.signal.vacuum_wavelength}"
                f" + 1/{self.pump.vacuum_wavelength} within 1e-3 relative"
            )

    def by_label(self, label: str) -> WavelengthChannel:
        if label == "signal":
            return self.signal
        if label == "pump":
            return self.pump
        if label == "sum":
            return self.sum
        raise ValueError(f"unknown channel label {label!r}")


def standard_channels(
    n_signal: float = 1.8157, n_pump: float = 1.8423, n_sum: float = 1.8893
) -> ChannelSet:
    """The 1550 nm + 810 nm -> 532 nm channel triple with KTP-like indices."""
    return ChannelSet(
        signal=WavelengthChannel("signal", 1550e-9, n_signal),
        pump=WavelengthChannel("pump", 810e-9, n_pump),
        sum=WavelengthChannel("sum", 532e-9, n_sum),
    )


@dataclass(frozen=True)
class FieldTriple:
    """Complex amplitudes of the three fields, photon-flux normalized."""

    a_signal: complex
    a_pump: complex
    a_sum: complex

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (self.a_signal, self.a_pump, self.a_sum)


@dataclass(frozen=True)
class CrystalSpec:
    """Nonlinear crystal: geometry, per-channel loss, coupling, phase mismatch.

    kappa has units (photons/s)^(-1/2) m^-1 so that kappa * |a| is a spatial
    rate; delta_k is the residual wave-vector mismatch left after
    quasi-phase matching, in 1/meter.
    """

    length: float
    alpha_signal: float
    alpha_pump: float
    alpha_sum: float
    kappa: float
    delta_k: float

    def __post_init__(self) -> None:
        if self.length <= 0.0:
            raise ValueError("crystal length must be positive")
        for name in ("alpha_signal", "alpha_pump", "alpha_sum"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        if self.kappa < 0.0:
            raise ValueError("kappa must be non-negative")

    def alpha(self, label: str) -> float:
        return {"signal": self.alpha_signal, "pump": self.alpha_pump, "sum": self.alpha_sum}[label]


@dataclass(frozen=True)
class MirrorSpec:
    """Power reflectivities of both cavity mirrors for all three channels."""

    left_signal: float
    left_pump: float
    left_sum: float
    right_signal: float
    right_pump: float
    right_sum: float

    def __post_init__(self) -> None:
        for name in (
            "left_signal", "left_pump", "left_sum",
            "right_signal", "right_pump", "right_sum",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"mirror reflectivity {name} must lie in [0, 1], got {value}")

    def reflectivity(self, side: str, label: str) -> float:
        if side not in MIRROR_SIDES:
            raise ValueError(f"mirror side must be one of {MIRROR_SIDES}, got {side!r}")
        if label not in CHANNEL_LABELS:
            raise ValueError(f"channel label must be one of {CHANNEL_LABELS}, got {label!r}")
        return getattr(self, f"{side}_{label}")

    def amplitude_coefficients(self, side: str, label: str) -> tuple[float, float]:
        """Amplitude (r, t) with r = sqrt(R), t = sqrt(1 - R); r^2 + t^2 = 1."""
        big_r = self.reflectivity(side, label)
        return (big_r ** 0.5, (1.0 - big_r) ** 0.5)


@dataclass(frozen=True)
class MetricsConfig:
    """Detector-side calibration: power-meter correction and port-power ratio.

    gamma folds the quantum-efficiency ratio of the 1550 nm and 532 nm power
    meters into one dimensionless factor; kappa_ratio is the no-pump maximum
    of the transmitted signal as a fraction of the incident power, the
    transmission weight in the depletion metric (0 means "derive it from
    the data or the model").
    """

    gamma: float = 1.0
    kappa_ratio: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.kappa_ratio < 0.0:
            raise ValueError("kappa_ratio must be non-negative")


def power_to_flux(power: float, channel: WavelengthChannel) -> float:
    """Convert optical power (W) to photon flux (photons/s) at a channel."""
    if power < 0.0:
        raise ValueError("power must be non-negative")
    return power * channel.vacuum_wavelength / (PLANCK_CONSTANT * SPEED_OF_LIGHT)


def flux_to_power(flux: float, channel: WavelengthChannel) -> float:
    """Convert photon flux (photons/s) to optical power (W); inverse of power_to_flux."""
    if flux < 0.0:
        raise ValueError("flux must be non-negative")
    return flux * PLANCK_CONSTANT * SPEED_OF_LIGHT / channel.vacuum_wavelength


def conversion_efficiency(p_532: float, p_1550: float, metrics: MetricsConfig) -> float:
    """Photon-number conversion efficiency from the two meter readings.

    eta = gamma * (532 * P_532) / (1550 * P_1550), the emitted 532 nm photon
    rate over the incident 1550 nm photon rate with the meter correction
    applied. The wavelength ratio uses the integer nanometer labels.
    """
    if p_1550 <= 0.0:
        raise ValueError("p_1550 must be positive")
    if p_532 < 0.0:
        raise ValueError("p_532 must be non-negative")
    return metrics.gamma * (SUM_NM * p_532) / (SIGNAL_NM * p_1550)


def relative_depletion(refl_norm: float, trans_norm: float, kappa_ratio: float) -> float:
    """Fraction of signal photons missing from the two monitored return ports.

    delta = 1 - (refl_norm + kappa_ratio * trans_norm). refl_norm is the
    reflection reading over its no-pump maximum (the far-from-resonance
    return, equal to the incident power), trans_norm the transmission
    reading over its own no-pump maximum, and kappa_ratio that transmission
    maximum as a fraction of the incident power.
    """
    if refl_norm < 0.0 or trans_norm < 0.0:
        raise ValueError("normalized port signals must be non-negative")
    if kappa_ratio < 0.0:
        raise ValueError("kappa_ratio must be non-negative")
    return 1.0 - (refl_norm + kappa_ratio * trans_norm)
