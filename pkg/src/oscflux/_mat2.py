"""Closed-form 2x2 matrix helpers shared by the solver and simulator modules.

Every routine here is specialized to 2x2 complex matrices; there is no
general-N machinery on purpose.
"""
from __future__ import annotations

import numpy as np

# Relative eigenvalue-gap threshold below which a matrix is treated as
# defective (degenerate two-term exponential instead of the modal form).
DEGENERATE_GAP = 1e-6


def trace_half_and_gap(m: np.ndarray) -> tuple[complex, complex]:
    """Return (mu, delta): eigenvalues of ``m`` are mu +/- delta."""
    mu = 0.5 * (m[0, 0] + m[1, 1])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    delta = np.sqrt(mu * mu - det + 0j)
    return mu, delta


def eigvals2(m: np.ndarray) -> tuple[complex, complex]:
    """Eigenvalues (mu + delta, mu - delta) of a 2x2 matrix."""
    mu, delta = trace_half_and_gap(m)
    return mu + delta, mu - delta


def _sinhc(z: np.ndarray) -> np.ndarray:
    """sinh(z)/z, equal to 1 at z = 0."""
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = np.sinh(z[nz]) / z[nz]
    return out


def expm2(m: np.ndarray, t) -> np.ndarray:
    """exp(m*t) for a 2x2 complex matrix, vectorized over ``t``.

    Uses the identity exp(m t) = e^{mu t} (cosh(delta t) I
    + t sinhc(delta t) (m - mu I)), which follows from
    (m - mu I)^2 = delta^2 I, and is exact for defective m (delta = 0).
    For |delta t| >= 0.5 the cosh/sinh pair is rewritten in terms of the
    two eigenvalue exponentials to avoid overflow of the separate factors.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    mu, delta = trace_half_and_gap(m)
    n = m - mu * np.eye(2)

    zt = delta * t
    small = np.abs(zt) < 0.5
    fc = np.empty(t.shape, dtype=complex)
    fs = np.empty(t.shape, dtype=complex)
    if np.any(small):
        ts = t[small]
        e = np.exp(mu * ts)
        fc[small] = e * np.cosh(delta * ts)
        fs[small] = e * ts * _sinhc(delta * ts)
    if np.any(~small):
        tl = t[~small]
        e1 = np.exp((mu + delta) * tl)
        e2 = np.exp((mu - delta) * tl)
        fc[~small] = 0.5 * (e1 + e2)
        fs[~small] = (e1 - e2) / (2.0 * delta)

    out = fc[..., None, None] * np.eye(2) + fs[..., None, None] * n
    return out[0] if scalar else out


def chol2_psd(h: np.ndarray) -> np.ndarray:
    """Lower-triangular factor L with L L^H = h for 2x2 Hermitian PSD h.

    Tolerates exactly singular input (a zero pivot forces a zero column,
    consistent with positive semi-definiteness); tiny negative values from
    rounding are clamped to zero.
    """
    h00 = max(h[0, 0].real, 0.0)
    l00 = np.sqrt(h00)
    if l00 > 0.0:
        l10 = h[1, 0] / l00
    else:
        l10 = 0.0 + 0.0j
    rem = h[1, 1].real - (l10 * np.conj(l10)).real
    l11 = np.sqrt(max(rem, 0.0))
    return np.array([[l00, 0.0], [l10, l11]], dtype=complex)
