"""
Resonator finesse, free spectral range, and linewidth
=====================================================

Small helpers tie the cavity geometry to what a scanning measurement shows.
A monolithic crystal resonator's optical roundtrip is twice its length times
the refractive index; finesse follows from mirror reflectivities and bulk
absorption; linewidth is the free spectral range divided by finesse.
"""
from sfgcavity import (
    effective_roundtrip_amplitude,
    finesse,
    linewidth_and_fsr,
    monolithic_roundtrip_length,
    reference_config,
    roundtrip_length_for_linewidth,
)

cavity = reference_config()

# the reference device, per channel
print("reference device:")
for label in ("signal", "pump"):
    channel = cavity.channels.by_label(label)
    roundtrip = monolithic_roundtrip_length(
        cavity.crystal.length, channel.refractive_index
    )
    f = finesse(effective_roundtrip_amplitude(cavity, label))
    fsr, width = linewidth_and_fsr(roundtrip, f)
    print(f"  {label:6s}: finesse {f:7.1f}   FSR {fsr * 1e-9:6.3f} GHz"
          f"   linewidth {width * 1e-6:7.2f} MHz")

# an 8.9 mm monolithic resonator with finesse 100 on both modes
roundtrip = monolithic_roundtrip_length(8.9e-3, 1.81)
fsr, width = linewidth_and_fsr(roundtrip, 100.0)
print()
print(f"8.9 mm monolithic, finesse 100: FSR {fsr * 1e-9:.3f} GHz, "
      f"linewidth {width * 1e-6:.1f} MHz")

# inverting the relation: a 1.3 MHz line at finesse 560 implies the cavity size
length = roundtrip_length_for_linewidth(560.0, 1.3e6)
print(f"finesse 560 with a 1.3 MHz linewidth implies a {length:.3f} m roundtrip")
