"""Single-pass integration of the three coupled-mode equations.

The photon-flux-normalized system integrated over z in [0, L] is

    da_s/dz   = i kappa a_sum conj(a_p) e^(-i dk z) - (alpha_s/2) a_s
    da_p/dz   = i kappa a_sum conj(a_s) e^(-i dk z) - (alpha_p/2) a_p
    da_sum/dz = i kappa a_s a_p e^(+i dk z) - (alpha_sum/2) a_sum

with one shared kappa (valid in photon-flux units). Internally the sum field
is propagated in the rotating frame b = a_sum e^(-i dk z), which makes the
system autonomous; the mismatch phase is unfolded once at the end of the
pass. Integration is fixed-step classical 4th order.

The private steppers are duck-typed: amplitudes may be python complex
scalars (fast for single cavities) or numpy complex arrays whose last axis
is a batch of independent parameter sets.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import CrystalSpec, FieldTriple

_DIRECTIONS = ("forward", "backward")


def _unfold_phase(phase: float):
    """exp(1j*phase) staying a python complex for scalar pipelines."""
    return cmath.exp(1j * phase)


def _pass_amplitudes(s, p, b, ik, ds, dp, dg, h, steps):
    """Advance (a_s, a_p, b) through one crystal pass; no loss bookkeeping.

    ik = 1j*kappa; ds, dp = alpha/2 damping rates; dg = alpha_sum/2 + 1j*dk
    (the rotating-frame diagonal). Any argument may be a numpy array.
    """
    hh = 0.5 * h
    h6 = h / 6.0
    for _ in range(steps):
        k1s = ik * b * p.conjugate() - ds * s
        k1p = ik * b * s.conjugate() - dp * p
        k1b = ik * s * p - dg * b
        s1 = s + hh * k1s; p1 = p + hh * k1p; b1 = b + hh * k1b
        k2s = ik * b1 * p1.conjugate() - ds * s1
        k2p = ik * b1 * s1.conjugate() - dp * p1
        k2b = ik * s1 * p1 - dg * b1
        s2 = s + hh * k2s; p2 = p + hh * k2p; b2 = b + hh * k2b
        k3s = ik * b2 * p2.conjugate() - ds * s2
        k3p = ik * b2 * s2.conjugate() - dp * p2
        k3b = ik * s2 * p2 - dg * b2
        s3 = s + h * k3s; p3 = p + h * k3p; b3 = b + h * k3b
        k4s = ik * b3 * p3.conjugate() - ds * s3
        k4p = ik * b3 * s3.conjugate() - dp * p3
        k4b = ik * s3 * p3 - dg * b3
        s = s + h6 * (k1s + 2.0 * (k2s + k3s) + k4s)
        p = p + h6 * (k1p + 2.0 * (k2p + k3p) + k4p)
        b = b + h6 * (k1b + 2.0 * (k2b + k3b) + k4b)
    return s, p, b


def _abs2(x):
    return (x * x.conjugate()).real


def _pass_with_absorption(s, p, b, ik, ds, dp, dg, alphas, h, steps):
    """Like _pass_amplitudes, also integrating absorbed flux per channel.

    The absorbed-flux quadratures dQ_c/dz = alpha_c |a_c|^2 ride along the
    same Runge-Kutta stages, so the budget closes to the integrator's own
    discretization error. Returns (s, p, b, q_s, q_p, q_sum).
    """
    al_s, al_p, al_g = alphas
    hh = 0.5 * h
    h6 = h / 6.0
    qs = qp = qg = 0.0
    for _ in range(steps):
        k1s = ik * b * p.conjugate() - ds * s
        k1p = ik * b * s.conjugate() - dp * p
        k1b = ik * s * p - dg * b
        s1 = s + hh * k1s; p1 = p + hh * k1p; b1 = b + hh * k1b
        k2s = ik * b1 * p1.conjugate() - ds * s1
        k2p = ik * b1 * s1.conjugate() - dp * p1
        k2b = ik * s1 * p1 - dg * b1
        s2 = s + hh * k2s; p2 = p + hh * k2p; b2 = b + hh * k2b
        k3s = ik * b2 * p2.conjugate() - ds * s2
        k3p = ik * b2 * s2.conjugate() - dp * p2
        k3b = ik * s2 * p2 - dg * b2
        s3 = s + h * k3s; p3 = p + h * k3p; b3 = b + h * k3b
        k4s = ik * b3 * p3.conjugate() - ds * s3
        k4p = ik * b3 * s3.conjugate() - dp * p3
        k4b = ik * s3 * p3 - dg * b3
        qs = qs + h6 * al_s * (_abs2(s) + 2.0 * (_abs2(s1) + _abs2(s2)) + _abs2(s3))
        qp = qp + h6 * al_p * (_abs2(p) + 2.0 * (_abs2(p1) + _abs2(p2)) + _abs2(p3))
        qg = qg + h6 * al_g * (_abs2(b) + 2.0 * (_abs2(b1) + _abs2(b2)) + _abs2(b3))
        s = s + h6 * (k1s + 2.0 * (k2s + k3s) + k4s)
        p = p + h6 * (k1p + 2.0 * (k2p + k3p) + k4p)
        b = b + h6 * (k1b + 2.0 * (k2b + k3b) + k4b)
    return s, p, b, qs, qp, qg


def _pass_coefficients(crystal: CrystalSpec, steps: int):
    """Precompute stepper constants for one crystal pass."""
    h = crystal.length / steps
    ik = 1j * crystal.kappa
    ds = 0.5 * crystal.alpha_signal
    dp = 0.5 * crystal.alpha_pump
    dg = complex(0.5 * crystal.alpha_sum, crystal.delta_k)
    return h, ik, ds, dp, dg


@dataclass(frozen=True)
class PassResult:
    """Output fields of one crystal pass plus the flux lost to absorption."""

    out_fields: FieldTriple
    absorbed_signal: float
    absorbed_pump: float
    absorbed_sum: float

    def __post_init__(self) -> None:
        for name in ("absorbed_signal", "absorbed_pump", "absorbed_sum"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")


def integrate_pass(
    in_fields: FieldTriple,
    crystal: CrystalSpec,
    direction: str = "forward",
    steps: int = 200,
) -> PassResult:
    """Propagate the field triple through one crystal pass.

    The backward pass runs the identical equations with a fresh z origin and
    the same delta_k (the crystal is quasi-phase matched in both
    directions); the direction argument exists for call-site bookkeeping.
    Absorbed flux per channel is accumulated alongside the amplitudes.
    """
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}, got {direction!r}")
    if int(steps) != steps or steps < 1:
        raise ValueError("steps must be a positive integer")
    amps = [complex(a) for a in in_fields.as_tuple()]
    for a in amps:
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValueError("input amplitudes must be finite")
    h, ik, ds, dp, dg = _pass_coefficients(crystal, int(steps))
    alphas = (crystal.alpha_signal, crystal.alpha_pump, crystal.alpha_sum)
    s, p, b, qs, qp, qg = _pass_with_absorption(
        amps[0], amps[1], amps[2], ik, ds, dp, dg, alphas, h, int(steps)
    )
    a_sum = b * _unfold_phase(crystal.delta_k * crystal.length)
    return PassResult(
        out_fields=FieldTriple(a_signal=s, a_pump=p, a_sum=a_sum),
        absorbed_signal=float(qs),
        absorbed_pump=float(qp),
        absorbed_sum=float(qg),
    )


def _sinc(x: float) -> float:
    """sin(x)/x with the removable singularity filled in."""
    if x == 0.0:
        return 1.0
    return math.sin(x) / x


def undepleted_pump_solution(
    a_s0: complex, pump_flux: float, crystal: CrystalSpec, z: float
) -> FieldTriple:
    """Analytic lossless solution used as an integration oracle.

    Phase convention: the pump amplitude is taken real positive,
    a_p = sqrt(pump_flux). For delta_k = 0 the full constant-pump solution
    applies: a_s(z) = a_s0 cos(g z), a_sum(z) = i a_s0 sin(g z) with
    g = kappa sqrt(pump_flux). For delta_k != 0 the low-gain limit is
    returned: a_s unchanged and
    a_sum(z) = i a_s0 g z e^(i dk z / 2) sinc(dk z / 2). Crystal absorption
    coefficients are ignored (the oracle is lossless by construction).
    """
    if pump_flux <= 0.0:
        raise ValueError("pump_flux must be positive")
    if z < 0.0:
        raise ValueError("z must be non-negative")
    a_p = math.sqrt(pump_flux)
    g = crystal.kappa * a_p
    a_s0 = complex(a_s0)
    if crystal.delta_k == 0.0:
        a_s = a_s0 * math.cos(g * z)
        a_sum = 1j * a_s0 * math.sin(g * z)
    else:
        half = 0.5 * crystal.delta_k * z
        a_s = a_s0
        a_sum = 1j * a_s0 * g * z * cmath.exp(1j * half) * _sinc(half)
    return FieldTriple(a_signal=a_s, a_pump=complex(a_p), a_sum=a_sum)


__all__ = [
    "PassResult",
    "integrate_pass",
    "undepleted_pump_solution",
]
