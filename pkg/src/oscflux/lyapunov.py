"""Stationary covariance, resolvent spectrum and two-time correlators.

For the stable linear Langevin system da/dt = M a + xi with
<xi*(t+tau) xi^T(t)> = 2 D delta(tau), the stationary second moments
C_ij = <a_i* a_j> solve

    M* C + C M^T + 2 D = 0,

the spectrum matrix is S(w) = (1/pi) (M* - i w I)^{-1} D (M^T + i w I)^{-1},
and the stationary two-time correlator is exp(M* tau) C for tau > 0.

These three routines are closed-form / direct linear algebra on the 2x2
system and serve as the independent reference for both the explicit spectrum
formulas in :mod:`oscflux.analytic` and the Monte Carlo estimators.
"""
from __future__ import annotations

import numpy as np

from ._mat2 import expm2, eigvals2
from .model import LinearSystem

__all__ = [
    "UnstableSystemError",
    "stationary_covariance",
    "spectrum_resolvent",
    "two_time_correlator",
]

_I2 = np.eye(2)


class UnstableSystemError(ValueError):
    """Raised when the drift matrix is not strictly stable."""


def drift_eigenvalues(system: LinearSystem) -> tuple[complex, complex]:
    """Eigenvalues of the drift matrix."""
    return eigvals2(system.drift)


def require_stable(system: LinearSystem) -> None:
    """Raise unless both drift eigenvalues have strictly negative real part."""
    l1, l2 = drift_eigenvalues(system)
    if l1.real >= 0 or l2.real >= 0:
        raise UnstableSystemError(
            f"drift eigenvalues {l1}, {l2} are not strictly stable")


def stationary_covariance(system: LinearSystem) -> np.ndarray:
    """Solve M* C + C M^T + 2 D = 0 for the 2x2 stationary covariance.

    The equation is vectorized row-major, vec(A X B) = (A kron B^T) vec(X),
    and solved as a single 4x4 linear system, independent of any hand-derived
    closed form.  The result is symmetrized to be exactly Hermitian.

    Raises
    ------
    UnstableSystemError
        If the drift is not strictly stable (the equation would be singular
        or the "stationary" state meaningless).
    """
    require_stable(system)
    m = system.drift
    op = np.kron(m.conj(), _I2) + np.kron(_I2, m)  # M* C I + I C M^T
    rhs = (-2.0 * system.diffusion).reshape(-1).astype(complex)
    c = np.linalg.solve(op, rhs).reshape(2, 2)
    return 0.5 * (c + c.conj().T)


def spectrum_resolvent(system: LinearSystem, freq) -> np.ndarray:
    """Spectrum matrix S(w) = (1/pi) (M* - iwI)^{-1} D (M^T + iwI)^{-1}.

    ``freq`` may be a scalar or an array; the result has shape
    ``freq.shape + (2, 2)`` (or ``(2, 2)`` for scalar input).  Evaluated by
    direct 2x2 complex inversion at each frequency; for a stable system the
    resolvent exists for every real frequency, so no singularities arise.
    """
    require_stable(system)
    w = np.asarray(freq, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    m = system.drift
    d = system.diffusion.astype(complex)
    a = m.conj()[None, :, :] - 1j * w[:, None, None] * _I2
    b = m.T[None, :, :] + 1j * w[:, None, None] * _I2
    ainv = np.linalg.inv(a)
    binv = np.linalg.inv(b)
    s = (1.0 / np.pi) * np.einsum("wij,jk,wkl->wil", ainv, d, binv)
    return s[0] if scalar else s


def two_time_correlator(system: LinearSystem, c_st: np.ndarray, lag) -> np.ndarray:
    """Stationary correlator K(tau) with K_ij(tau) = <a_i*(t+tau) a_j(t)>.

    K(tau) = exp(M* tau) C for tau > 0 and C exp(-M^T tau) for tau < 0;
    at tau = 0 both branches reduce to ``c_st``.  ``lag`` may be scalar or an
    array; the result has shape ``lag.shape + (2, 2)``.  The 2x2 matrix
    exponential is evaluated in the closed form of :func:`oscflux._mat2.expm2`,
    which degrades gracefully to the degenerate (coalesced-eigenvalue) limit.
    """
    require_stable(system)
    tau = np.asarray(lag, dtype=float)
    scalar = tau.ndim == 0
    tau = np.atleast_1d(tau)
    m = system.drift
    out = np.empty(tau.shape + (2, 2), dtype=complex)
    pos = tau >= 0
    if np.any(pos):
        e = expm2(m.conj(), tau[pos])
        out[pos] = np.einsum("tij,jk->tik", e, c_st)
    if np.any(~pos):
        # C exp(-M^T tau) with tau < 0: exp(M^T s) at s = -tau > 0.
        e = expm2(m.T, -tau[~pos])
        out[~pos] = np.einsum("ij,tjk->tik", c_st, e)
    return out[0] if scalar else out
