"""Physical parameters and the linear Langevin system they define.

Two damped oscillators with amplitudes a1, a2 exchange energy through a
coherent coupling and are driven by independent thermal noise sources:

    d/dt (a1, a2) = M (a1, a2) + (xi1, xi2)

with drift M = [[-gamma1, -i*coupling], [-i*coupling, -gamma2]] and noise
correlations <xi_i*(t+tau) xi_j(t)> = 2 D_ij delta(tau), where
D = diag(gamma1*temp1, gamma2*temp2).

All rates and frequencies are expressed in units of the oscillators' common
natural frequency; the dynamics live in the rotating frame, so that frequency
never enters any computation.  Temperatures are classical energy scales with
k_B = 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "InvalidParamsError",
    "OscillatorPairParams",
    "LinearSystem",
    "validate",
    "build_system",
]


class InvalidParamsError(ValueError):
    """Raised when oscillator-pair parameters violate an invariant."""


@dataclass(frozen=True)
class OscillatorPairParams:
    """Relaxation rates, coupling strength and reservoir temperatures.

    Attributes
    ----------
    gamma1, gamma2 : float
        Relaxation rates of the two oscillators (rate units).
    coupling : float
        Coherent coupling strength between the oscillators.
    temp1, temp2 : float
        Reservoir temperatures driving oscillator 1 and 2 (energy units,
        k_B = 1).
    """

    gamma1: float
    gamma2: float
    coupling: float
    temp1: float
    temp2: float


@dataclass(frozen=True)
class LinearSystem:
    """Drift and diffusion matrices of the Langevin equation.

    ``drift`` is the 2x2 complex matrix M; ``diffusion`` is the 2x2 real
    diagonal matrix D with non-negative entries.
    """

    drift: np.ndarray
    diffusion: np.ndarray


def validate(params: OscillatorPairParams) -> OscillatorPairParams:
    """Check all parameter invariants, returning ``params`` unchanged.

    Raises
    ------
    InvalidParamsError
        Naming the violated invariant.  Validation rejects rather than
        clamps: silently adjusted values would corrupt parameter sweeps.
    """
    g1, g2 = params.gamma1, params.gamma2
    om = params.coupling
    t1, t2 = params.temp1, params.temp2
    for name, value in (("gamma1", g1), ("gamma2", g2), ("coupling", om),
                        ("temp1", t1), ("temp2", t2)):
        if not np.isfinite(value):
            raise InvalidParamsError(f"{name} must be finite, got {value!r}")
    if g1 < 0 or g2 < 0:
        raise InvalidParamsError("negative relaxation rate")
    if g1 + g2 <= 0:
        raise InvalidParamsError("no damping: gamma1 + gamma2 must be > 0")
    if om < 0:
        raise InvalidParamsError("negative coupling")
    if t1 < 0 or t2 < 0:
        raise InvalidParamsError("negative temperature")
    if t1 + t2 <= 0:
        raise InvalidParamsError("both reservoir temperatures are zero")
    # tr M < 0 is guaranteed above; det M = gamma1*gamma2 + coupling^2 > 0
    # is the remaining condition for both eigenvalues to have strictly
    # negative real part.
    det = g1 * g2 + om * om
    if det <= 0:
        raise InvalidParamsError(
            "marginally stable: an undamped oscillator needs nonzero coupling")
    # the slow decay rate is ~ det / (gamma1 + gamma2); below ~1e-12 of the
    # fast one it is lost to rounding and stability ceases to be assertable
    half_trace = 0.5 * (g1 + g2)
    if half_trace == 0.0:
        raise InvalidParamsError(
            "numerically marginal: gamma1 + gamma2 underflows to zero")
    if det < 1e-12 * half_trace * half_trace:
        raise InvalidParamsError(
            "numerically marginal: slow-mode decay below float resolution "
            "(gamma1*gamma2 + coupling^2 too small next to (gamma1+gamma2)^2)")
    return params


def build_system(params: OscillatorPairParams) -> LinearSystem:
    """Construct the drift and diffusion matrices for validated parameters.

    Pure function: identical inputs give bit-identical outputs.
    """
    p = validate(params)
    drift = np.array([[-p.gamma1, -1j * p.coupling],
                      [-1j * p.coupling, -p.gamma2]], dtype=complex)
    diffusion = np.array([[p.gamma1 * p.temp1, 0.0],
                          [0.0, p.gamma2 * p.temp2]], dtype=float)
    return LinearSystem(drift=drift, diffusion=diffusion)
