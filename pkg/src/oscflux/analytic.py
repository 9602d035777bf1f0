"""Closed-form results for the coupled thermally driven oscillator pair.

Everything in this module is an explicit function of the five physical
parameters; no linear algebra is performed at run time.  The spectrum
formulas here and the resolvent evaluation in :mod:`oscflux.lyapunov` are
the same mathematical object computed by two independent routes, and the
test suite holds them to elementwise agreement at 1e-10 relative.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import OscillatorPairParams, validate

__all__ = [
    "ModalDecomposition",
    "CouplingLandmarks",
    "modal_decomposition",
    "coupling_landmarks",
    "phi_potential",
    "spectrum_closed_form",
    "energy_flow_spectrum",
    "omega_max_analytic",
    "splitting_coupling",
]


@dataclass(frozen=True)
class ModalDecomposition:
    """Eigenvalues and eigenvectors of the drift matrix.

    ``lambda1`` carries the + branch of the square root, ``lambda2`` the -
    branch.  Eigenvectors have their second component normalized to 1
    (except in the uncoupled limit, where they are the coordinate axes).
    At exact coalescence ``e2`` is None and ``coalescent`` is True: the two
    eigenvectors have merged and only one direction exists.
    """

    lambda1: complex
    lambda2: complex
    e1: np.ndarray
    e2: np.ndarray | None
    coalescent: bool


@dataclass(frozen=True)
class CouplingLandmarks:
    """The two special coupling strengths of the pair.

    ``omega_ep`` = |gamma2 - gamma1| / 2 is where the drift eigenvalues and
    eigenvectors coalesce.  ``omega_cr`` = sqrt((gamma1^2 + gamma2^2) / 2) is
    where the energy-flow spectrum's single maximum splits in two.  Neither
    depends on the reservoir temperatures, and omega_cr >= omega_ep always.
    """

    omega_ep: float
    omega_cr: float


def modal_decomposition(params: OscillatorPairParams) -> ModalDecomposition:
    """Eigenvalues lambda = -(g1+g2)/2 +/- sqrt((g1-g2)^2 - 4 Om^2)/2.

    Coalescence (the discriminant vanishing) is reported via the
    ``coalescent`` flag, not as an error.
    """
    p = validate(params)
    g1, g2, om = p.gamma1, p.gamma2, p.coupling
    mu = -0.5 * (g1 + g2)
    disc = (g1 - g2) ** 2 - 4.0 * om * om
    half_root = 0.5 * np.sqrt(complex(disc))
    lam1 = mu + half_root
    lam2 = mu - half_root
    if om == 0.0:
        # Decoupled: coordinate axes.  lambda1 = -min(g1, g2), so it pairs
        # with the axis of the more weakly damped oscillator.
        axis1 = np.array([1.0, 0.0], dtype=complex)
        axis2 = np.array([0.0, 1.0], dtype=complex)
        if g1 <= g2:
            return ModalDecomposition(lam1, lam2, axis1, axis2, False)
        return ModalDecomposition(lam1, lam2, axis2, axis1, False)
    if disc == 0.0:
        e1 = np.array([1j * (g2 - g1) / (2.0 * om), 1.0], dtype=complex)
        return ModalDecomposition(lam1, lam2, e1, None, True)
    e1 = np.array([1j * (g2 - g1 + 2.0 * half_root) / (2.0 * om), 1.0])
    e2 = np.array([1j * (g2 - g1 - 2.0 * half_root) / (2.0 * om), 1.0])
    return ModalDecomposition(lam1, lam2, e1, e2, False)


def coupling_landmarks(params: OscillatorPairParams) -> CouplingLandmarks:
    p = validate(params)
    ep = 0.5 * abs(p.gamma2 - p.gamma1)
    cr = np.sqrt(0.5 * (p.gamma1 ** 2 + p.gamma2 ** 2))
    return CouplingLandmarks(omega_ep=ep, omega_cr=float(cr))


def phi_potential(params: OscillatorPairParams, freq) -> np.ndarray:
    """Quartic denominator Phi(w) = (g1 g2 + Om^2)^2 - 2 (Om^2 - Om_cr^2) w^2 + w^4.

    Above the critical coupling the naive three-term form cancels near the
    minima (the terms are fourth powers of O(1e-3) rates), so it is
    evaluated as (w^2 - (Om^2 - Om_cr^2))^2 + [(g1 g2 + Om^2)^2
    - (Om^2 - Om_cr^2)^2], whose bracket reduces exactly to
    (g1 + g2)^2 (Om^2 - Om_ep^2) >= 0.  Below the critical coupling all
    naive terms are non-negative and the direct form is used.
    """
    p = validate(params)
    w2 = np.square(np.asarray(freq, dtype=float))
    g1, g2, om = p.gamma1, p.gamma2, p.coupling
    om2 = om * om
    cr2 = 0.5 * (g1 * g1 + g2 * g2)
    if om2 > cr2:
        ep2 = 0.25 * (g2 - g1) ** 2
        return (w2 - (om2 - cr2)) ** 2 + (g1 + g2) ** 2 * (om2 - ep2)
    return (g1 * g2 + om2) ** 2 + 2.0 * (cr2 - om2) * w2 + w2 * w2


def spectrum_closed_form(params: OscillatorPairParams, freq_grid) -> np.ndarray:
    """Spectrum matrix S(w) evaluated elementwise from its explicit form.

    Returns an array of shape ``freqs.shape + (2, 2)``.  With
    P = pi * Phi(w):

        S11 = (g1 T1 (g2^2 + w^2) + g2 T2 Om^2) / P
        S22 = (g2 T2 (g1^2 + w^2) + g1 T1 Om^2) / P
        S12 = (Om w (g1 T1 + g2 T2) + i Om g1 g2 (T2 - T1)) / P
        S21 = conj(S12)

    S(w) is Hermitian positive semi-definite at every real frequency; the
    imaginary parts of the two off-diagonal elements differ only in sign.
    """
    p = validate(params)
    w = np.asarray(freq_grid, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    g1, g2, om, t1, t2 = p.gamma1, p.gamma2, p.coupling, p.temp1, p.temp2
    denom = np.pi * phi_potential(p, w)
    w2 = w * w
    s = np.empty(w.shape + (2, 2), dtype=complex)
    s[..., 0, 0] = (g1 * t1 * (g2 * g2 + w2) + g2 * t2 * om * om) / denom
    s[..., 1, 1] = (g2 * t2 * (g1 * g1 + w2) + g1 * t1 * om * om) / denom
    s12 = (om * w * (g1 * t1 + g2 * t2) + 1j * om * g1 * g2 * (t2 - t1)) / denom
    s[..., 0, 1] = s12
    s[..., 1, 0] = np.conj(s12)
    return s[0] if scalar else s


def energy_flow_spectrum(params: OscillatorPairParams, freq_grid) -> np.ndarray:
    """Mean energy-flow spectrum <J(w)> = Om g1 g2 (T2 - T1) / (pi Phi(w)).

    Equal to Im S12(w); its sign is that of (T2 - T1) at every frequency:
    on average the flow runs from the hotter to the colder reservoir.
    """
    p = validate(params)
    w = np.asarray(freq_grid, dtype=float)
    num = p.coupling * p.gamma1 * p.gamma2 * (p.temp2 - p.temp1)
    return num / (np.pi * phi_potential(p, w))


def omega_max_analytic(params: OscillatorPairParams) -> np.ndarray:
    """Frequencies maximizing |<J(w)>| (equivalently minimizing Phi).

    Returns ``[0.0]`` for coupling <= omega_cr (the threshold itself counts
    as unsplit) and ``[-r, +r]`` with r = sqrt(Om^2 - Om_cr^2) above it.
    """
    p = validate(params)
    cr = np.sqrt(0.5 * (p.gamma1 ** 2 + p.gamma2 ** 2))
    if p.coupling <= cr:
        return np.array([0.0])
    r = np.sqrt((p.coupling - cr) * (p.coupling + cr))
    return np.array([-r, r])


def _curvature_indicator(params: OscillatorPairParams, oscillator: int,
                         coupling: float) -> float:
    """Sign-carrying value proportional to d^2(S_ii)/dw^2 at w = 0.

    Writing S_ii = N(u)/(pi Phi(u)) with u = w^2, N(u) = A u + B and
    Phi(u) = u^2 + b u + c, the second frequency derivative at zero is
    2 (A c - B b) / (pi c^2); only the numerator A c - B b matters for the
    sign.  Positive means w = 0 has become a local minimum (split spectrum).
    """
    g1, g2 = params.gamma1, params.gamma2
    t1, t2 = params.temp1, params.temp2
    if oscillator == 2:
        g1, g2 = g2, g1
        t1, t2 = t2, t1
    om2 = coupling * coupling
    cr2 = 0.5 * (g1 * g1 + g2 * g2)
    a = g1 * t1
    b_num = g1 * t1 * g2 * g2 + g2 * t2 * om2
    c = (g1 * g2 + om2) ** 2
    b = -2.0 * (om2 - cr2)
    return a * c - b_num * b


def count_spectrum_maxima(params: OscillatorPairParams, oscillator: int,
                          coupling: float, n_points: int = 200_001,
                          half_width: float | None = None) -> int:
    """Count strict local maxima of S_ii on a dense symmetric grid.

    The assumption-free splitting detector: one maximum means an unsplit
    spectrum, two a split one.  Default grid spans |w| <= 10 * max(g1, g2).
    """
    p = validate(params)
    if half_width is None:
        half_width = 10.0 * max(p.gamma1, p.gamma2)
    probe = OscillatorPairParams(p.gamma1, p.gamma2, coupling, p.temp1, p.temp2)
    w = np.linspace(-half_width, half_width, n_points)
    s = spectrum_closed_form(probe, w)[:, oscillator - 1, oscillator - 1].real
    interior = (s[1:-1] > s[:-2]) & (s[1:-1] > s[2:])
    return int(np.count_nonzero(interior))


def splitting_coupling(params: OscillatorPairParams, oscillator: int,
                       criterion: str = "curvature",
                       bracket: tuple[float, float] | None = None,
                       rel_tol: float = 1e-6) -> float | None:
    """Smallest coupling at which S_ii transitions from one maximum to two.

    Parameters
    ----------
    oscillator : int
        1 or 2, selecting the diagonal spectrum element.
    criterion : str
        ``"curvature"`` detects the sign change of d^2 S_ii/dw^2 at w = 0
        (exact for this rational spectrum family); ``"peak_count"`` counts
        strict local maxima on a dense grid and serves as the
        assumption-free cross-check.
    bracket : (float, float), optional
        Coupling search interval; defaults to (0, 10 * omega_cr].
    rel_tol : float
        Relative bisection tolerance on the returned coupling.

    Returns
    -------
    float or None
        The splitting coupling, or None when no transition occurs inside
        the bracket (reported, not fatal).
    """
    p = validate(params)
    if oscillator not in (1, 2):
        raise ValueError("oscillator must be 1 or 2")
    cr = coupling_landmarks(p).omega_cr
    if bracket is None:
        bracket = (1e-9 * cr, 10.0 * cr)
    lo, hi = bracket
    if not (0 <= lo < hi):
        raise ValueError(f"bad bracket {bracket!r}")

    if criterion == "curvature":
        def is_split(om: float) -> bool:
            return _curvature_indicator(p, oscillator, om) > 0.0
    elif criterion == "peak_count":
        def is_split(om: float) -> bool:
            return count_spectrum_maxima(p, oscillator, om) >= 2
    else:
        raise ValueError(f"unknown criterion {criterion!r}")

    if is_split(lo) or not is_split(hi):
        return None
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if is_split(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
