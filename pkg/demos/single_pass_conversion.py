"""
Single-pass sum-frequency conversion
====================================

One trip through the nonlinear crystal: a weak 1550 nm signal rides along a
strong 810 nm pump and partially converts to 532 nm. The integrator works on
photon-flux amplitudes, so photon-number bookkeeping (Manley-Rowe) is a
direct sanity check, and in the weak-signal limit the numerical pass should
land on the undepleted-pump closed form.
"""
import math

from sfgcavity import (
    CrystalSpec,
    FieldTriple,
    integrate_pass,
    power_to_flux,
    standard_channels,
    undepleted_pump_solution,
)

channels = standard_channels()

# lossless crystal on phase matching, coupling boosted so one pass converts visibly
crystal = CrystalSpec(
    length=9.3e-3,
    alpha_signal=0.0,
    alpha_pump=0.0,
    alpha_sum=0.0,
    kappa=1.2e-7,
    delta_k=0.0,
)

signal_flux = power_to_flux(2e-3, channels.signal)
pump_flux = power_to_flux(0.5, channels.pump)
fields = FieldTriple(
    a_signal=math.sqrt(signal_flux) + 0j,
    a_pump=math.sqrt(pump_flux) + 0j,
    a_sum=0j,
)

result = integrate_pass(fields, crystal, steps=400)
out = result.out_fields

print("input  photon fluxes (1/s):")
print(f"  signal {signal_flux:.4e}   pump {pump_flux:.4e}   sum 0")
print("output photon fluxes (1/s):")
print(f"  signal {abs(out.a_signal)**2:.4e}   pump {abs(out.a_pump)**2:.4e}"
      f"   sum {abs(out.a_sum)**2:.4e}")

converted = abs(out.a_sum) ** 2 / signal_flux
print(f"single-pass conversion of the signal: {converted:.4%}")

# Manley-Rowe: each 532 photon costs one signal photon and one pump photon
mr_signal = abs(out.a_signal) ** 2 + abs(out.a_sum) ** 2 - signal_flux
mr_pump = abs(out.a_pump) ** 2 + abs(out.a_sum) ** 2 - pump_flux
print(f"Manley-Rowe residuals: signal {mr_signal / signal_flux:.2e}"
      f"   pump {mr_pump / pump_flux:.2e}")

# weak-signal check against the undepleted-pump closed form
weak = FieldTriple(a_signal=1.0 + 0j, a_pump=math.sqrt(pump_flux) + 0j, a_sum=0j)
numeric = integrate_pass(weak, crystal, steps=400).out_fields
closed = undepleted_pump_solution(1.0 + 0j, pump_flux, crystal, crystal.length)
rel = abs(numeric.a_sum - closed.a_sum) / abs(closed.a_sum)
print(f"undepleted-pump closed form, relative deviation: {rel:.2e}")
