"""
Coupler reflectivity design study
=================================

The input coupler of the reference device reflects 96.5% of the signal. That
was chosen for a different impedance point; letting the optimizer vary the
signal-side reflectivity under a 200 mW pump budget shows the conversion
ceiling moves above 90% near R = 0.90, at the price of a stronger pump.
"""
from sfgcavity import SolverSettings, optimize_coupler, reference_config, solve_steady_state, reference_drive

# the coarser integrator keeps the demo interactive
cavity = reference_config(SolverSettings(steps_per_pass=100, rel_tolerance=1e-9))

baseline = solve_steady_state(cavity, reference_drive(81.5e-3))
print(f"current device (R = 0.965): eta = {baseline.eta:.4f} at 81.5 mW pump")
print()

design = optimize_coupler(
    cavity,
    signal_power=2e-3,
    pump_budget=0.200,
    reflectivity_range=(0.85, 0.965),
    grid_points=12,
    vary="signal",
    refine_iterations=6,
)

print("reflectivity   best pump (mW)   eta")
for point in design.grid:
    print(f"   {point.reflectivity:.4f}      {point.pump_power * 1e3:8.2f}     {point.eta:.4f}")

print()
print(f"best design: R = {design.best_reflectivity:.4f}, "
      f"pump = {design.best_pump_power * 1e3:.1f} mW, eta = {design.best_eta:.4f}")
gain = design.best_eta - baseline.eta
print(f"improvement over the current coupler: {gain:+.4f}")
