"""Unit conversions, channel bookkeeping, and parameter validation."""
import math

import pytest

from sfgcavity.model import (
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


def test_power_to_flux_oracle():
    # 1 mW at 1550 nm: P * lambda / (h c)
    channels = standard_channels()
    assert power_to_flux(1e-3, channels.signal) == pytest.approx(7.8028807e15, rel=1e-7)


def test_flux_power_roundtrip():
    channels = standard_channels()
    for label in ("signal", "pump", "sum"):
        channel = channels.by_label(label)
        power = 3.7e-3
        assert flux_to_power(power_to_flux(power, channel), channel) == pytest.approx(
            power, rel=1e-12
        )


def test_photon_energy():
    channels = standard_channels()
    assert channels.sum.photon_energy == pytest.approx(3.7339208e-19, rel=1e-7)
    # sum photons are more energetic than signal photons
    assert channels.sum.photon_energy > channels.pump.photon_energy
    assert channels.pump.photon_energy > channels.signal.photon_energy


def test_channel_set_energy_conservation():
    # 1/532 = 1/1550 + 1/810 holds within a part in a thousand
    standard_channels()
    with pytest.raises(ValueError):
        ChannelSet(
            signal=WavelengthChannel("signal", 1550e-9, 1.8157),
            pump=WavelengthChannel("pump", 810e-9, 1.8423),
            sum=WavelengthChannel("sum", 620e-9, 1.8893),
        )


def test_channel_lookup():
    channels = standard_channels()
    assert channels.by_label("pump").vacuum_wavelength == pytest.approx(810e-9)
    with pytest.raises(ValueError):
        channels.by_label("idler")


def test_wavelength_channel_validation():
    with pytest.raises(ValueError):
        WavelengthChannel("signal", -1550e-9, 1.8)
    with pytest.raises(ValueError):
        WavelengthChannel("signal", 1550e-9, 0.5)


def test_conversion_efficiency_oracle():
    # gamma * (532 * P532) / (1550 * P1550) as a photon-number ratio
    metrics = MetricsConfig(gamma=1.0337)
    assert conversion_efficiency(4.758e-3, 2e-3, metrics) == pytest.approx(
        0.844051, abs=1e-6
    )


def test_conversion_efficiency_unit_gamma_is_flux_ratio():
    channels = standard_channels()
    metrics = MetricsConfig(gamma=1.0)
    p532, p1550 = 1.3e-3, 2e-3
    expected = power_to_flux(p532, channels.sum) / power_to_flux(p1550, channels.signal)
    assert conversion_efficiency(p532, p1550, metrics) == pytest.approx(expected, rel=1e-9)


def test_relative_depletion():
    assert relative_depletion(0.10, 0.05, 0.5) == pytest.approx(0.875)
    # full reflection, no transmission channel: nothing depleted
    assert relative_depletion(1.0, 0.0, 0.0) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        relative_depletion(-0.1, 0.0, 0.5)
    with pytest.raises(ValueError):
        relative_depletion(0.1, 0.0, -0.5)


def test_crystal_validation():
    ok = CrystalSpec(
        length=9.3e-3, alpha_signal=0.19, alpha_pump=0.46, alpha_sum=0.0,
        kappa=2.6e-9, delta_k=240.0,
    )
    assert ok.alpha("pump") == pytest.approx(0.46)
    with pytest.raises(ValueError):
        CrystalSpec(length=0.0, alpha_signal=0.0, alpha_pump=0.0, alpha_sum=0.0,
                    kappa=1e-9, delta_k=0.0)
    with pytest.raises(ValueError):
        CrystalSpec(length=9.3e-3, alpha_signal=-0.1, alpha_pump=0.0, alpha_sum=0.0,
                    kappa=1e-9, delta_k=0.0)
    with pytest.raises(ValueError):
        CrystalSpec(length=9.3e-3, alpha_signal=0.0, alpha_pump=0.0, alpha_sum=0.0,
                    kappa=-1e-9, delta_k=0.0)


def test_mirror_validation_and_amplitudes():
    mirrors = MirrorSpec(
        left_signal=0.965, left_pump=0.965, left_sum=0.999,
        right_signal=0.999, right_pump=0.999, right_sum=0.001,
    )
    assert mirrors.reflectivity("left", "signal") == pytest.approx(0.965)
    r, t = mirrors.amplitude_coefficients("left", "signal")
    # lossless mirror: amplitude coefficients on the unit circle
    assert r * r + t * t == pytest.approx(1.0, abs=1e-15)
    assert r == pytest.approx(math.sqrt(0.965))
    with pytest.raises(ValueError):
        MirrorSpec(
            left_signal=1.2, left_pump=0.965, left_sum=0.999,
            right_signal=0.999, right_pump=0.999, right_sum=0.001,
        )
    with pytest.raises(ValueError):
        mirrors.reflectivity("top", "signal")


def test_metrics_validation():
    MetricsConfig(gamma=1.0337, kappa_ratio=0.15)
    with pytest.raises(ValueError):
        MetricsConfig(gamma=0.0)
    with pytest.raises(ValueError):
        MetricsConfig(gamma=1.0, kappa_ratio=-0.1)


def test_field_triple():
    fields = FieldTriple(a_signal=1 + 2j, a_pump=3j, a_sum=0j)
    assert fields.as_tuple() == (1 + 2j, 3j, 0j)
