"""Cross-oracle self-verification battery.

Each check pits two independently implemented routes against each other:
explicit spectrum formulas vs. resolvent linear algebra, closed-form noise
integrals vs. the stationary solver, Monte Carlo ensembles vs. closed forms,
and the exact temperature-scaling invariance.  The battery is what the
``verify`` CLI subcommand runs.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import simpson

from . import analytic, criticality, lyapunov, sde
from ._mat2 import expm2
from .model import OscillatorPairParams, build_system
from .spectral import SpectralOptions

__all__ = ["CheckResult", "run_verification", "random_valid_params"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_valid_params(rng: np.random.Generator,
                        allow_zero_coupling: bool = True) -> OscillatorPairParams:
    """Random stable parameter set with rates spread over three decades."""
    g1, g2 = 10.0 ** rng.uniform(-4, -1, size=2)
    cr = np.sqrt(0.5 * (g1 * g1 + g2 * g2))
    om = rng.uniform(0.0 if allow_zero_coupling else 0.05, 5.0) * cr
    t1, t2 = rng.uniform(0.0, 5.0, size=2)
    if t1 + t2 == 0.0:
        t2 = 1.0
    return OscillatorPairParams(g1, g2, om, t1, t2)


def _fig_rates(temp1: float, temp2: float) -> OscillatorPairParams:
    return OscillatorPairParams(1e-3, 2e-3, 1e-3, temp1, temp2)


def _rel_matrix_dev(a: np.ndarray, b: np.ndarray) -> float:
    scale = np.abs(b).max(axis=(-2, -1), keepdims=True)
    return float((np.abs(a - b) / scale).max())


def check_spectrum_equivalence(seed: int = 7) -> CheckResult:
    """Closed-form spectrum vs resolvent, 100 random params x 20 frequencies."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        p = random_valid_params(rng)
        system = build_system(p)
        scale = max(p.gamma1, p.gamma2, p.coupling)
        freqs = rng.uniform(-10 * scale, 10 * scale, size=20)
        s_closed = analytic.spectrum_closed_form(p, freqs)
        s_res = lyapunov.spectrum_resolvent(system, freqs)
        worst = max(worst, _rel_matrix_dev(s_closed, s_res))
    return CheckResult("spectrum_closed_form_vs_resolvent", worst <= 1e-10,
                       f"max relative deviation {worst:.3e} (tol 1e-10)")


def check_lyapunov_residual(seed: int = 11, n: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = random_valid_params(rng)
        system = build_system(p)
        c = lyapunov.stationary_covariance(system)
        m, d = system.drift, system.diffusion
        resid = np.linalg.norm(m.conj() @ c + c @ m.T + 2 * d)
        scale = np.linalg.norm(m) * np.linalg.norm(c) + np.linalg.norm(d)
        worst = max(worst, resid / scale)
    return CheckResult("lyapunov_residual", worst <= 1e-12,
                       f"max scaled residual {worst:.3e} over {n} systems (tol 1e-12)")


def check_wiener_khinchin(seed: int = 13, n: int = 10) -> CheckResult:
    """Integral of the resolvent spectrum equals the stationary covariance."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = random_valid_params(rng)
        system = build_system(p)
        c = lyapunov.stationary_covariance(system)
        half = 200.0 * max(p.gamma1, p.gamma2, p.coupling)
        w = np.linspace(-half, half, 200_001)
        s = lyapunov.spectrum_resolvent(system, w)
        integral = simpson(s, x=w, axis=0)
        worst = max(worst, float(np.abs(integral - c).max() / np.abs(c).max()))
    return CheckResult("wiener_khinchin_closure", worst <= 0.01,
                       f"max relative closure error {worst:.3e} (tol 1e-2)")


def brute_force_potential_argmin(params, n_points: int = 1_000_001) -> float:
    """|omega| at the grid minimum of the quartic denominator.

    Bins can tie bit-for-bit at the flat bottom (the potential varies below
    float precision there); the tie resolves to the smallest |omega|.
    """
    lim = 10.0 * max(params.gamma1, params.gamma2, params.coupling)
    w = np.linspace(-lim, lim, n_points)
    phi = analytic.phi_potential(params, w)
    tied = np.flatnonzero(phi == phi.min())
    return float(np.abs(w[tied]).min())


def check_omega_max_vs_potential() -> CheckResult:
    """Flow-maximum formula vs brute-force argmin of the quartic denominator."""
    p0 = _fig_rates(0.0, 1.0)
    cr = analytic.coupling_landmarks(p0).omega_cr
    worst = 0.0
    for factor in (0.67, 1.0, 3.0):
        p = replace(p0, coupling=factor * cr)
        lim = 10 * max(p.gamma2, p.coupling)
        step = 2 * lim / 1_000_000
        brute = brute_force_potential_argmin(p)
        pred = analytic.omega_max_analytic(p).max()
        worst = max(worst, abs(brute - pred) / step)
    return CheckResult("omega_max_vs_potential_argmin", worst <= 1.0,
                       f"worst deviation {worst:.3f} grid steps (tol 1 step)")


def check_splitting_criteria() -> CheckResult:
    """Curvature-based and peak-count splitting detectors agree to 1e-4."""
    p = _fig_rates(1.0, 1.0)
    devs, values = [], []
    for osc in (1, 2):
        a = analytic.splitting_coupling(p, osc, criterion="curvature")
        b = analytic.splitting_coupling(p, osc, criterion="peak_count")
        if a is None or b is None:
            return CheckResult("splitting_criteria_agreement", False,
                               f"oscillator {osc}: missing split "
                               f"(curvature={a}, peak_count={b})")
        devs.append(abs(a - b) / b)
        values.append((osc, a, b))
    detail = "; ".join(
        f"osc{osc}: curvature={a:.6e}, peak_count={b:.6e}" for osc, a, b in values)
    worst = max(devs)
    return CheckResult("splitting_criteria_agreement", worst <= 1e-4,
                       f"max relative disagreement {worst:.3e} (tol 1e-4); {detail}")


def check_increment_consistency() -> CheckResult:
    """Q(dt) saturates to the stationary covariance; one-step fixed point."""
    p = _fig_rates(0.7, 1.9)
    system = build_system(p)
    c = lyapunov.stationary_covariance(system)
    q_inf = sde.increment_covariance(system, 50.0 / min(p.gamma1, p.gamma2))
    sat = float(np.abs(q_inf - c).max() / np.abs(c).max())

    dt = 0.02 / max(p.gamma1, p.gamma2, p.coupling)
    e = expm2(system.drift, dt)
    q = sde.increment_covariance(system, dt)
    fixed = e.conj() @ c @ e.T + q
    fp = float(np.abs(fixed - c).max() / np.abs(c).max())
    ok = sat <= 1e-6 and fp <= 1e-10
    return CheckResult("increment_covariance_consistency", ok,
                       f"saturation dev {sat:.3e} (tol 1e-6), "
                       f"fixed-point dev {fp:.3e} (tol 1e-10)")


def check_ensemble_flow(n_realizations: int = 400, workers: int = 1,
                        base_seed: int = 2024) -> CheckResult:
    """Ensemble-mean flow spectrum vs closed form at the critical coupling."""
    p0 = _fig_rates(0.0, 1.0)
    cr = analytic.coupling_landmarks(p0).omega_cr
    p = replace(p0, coupling=cr)
    config = sde.default_sim_config(p, base_seed=base_seed,
                                    n_realizations=n_realizations)
    opts = SpectralOptions(half_width=5.0 * cr)
    res = criticality.flow_ensemble(p, config, opts, workers=workers)
    target = analytic.energy_flow_spectrum(p, res.freqs)
    rms = float(np.sqrt(np.mean((res.flow_mean / target - 1.0) ** 2)))
    tol = max(0.10, 4.0 / np.sqrt(n_realizations))
    return CheckResult("ensemble_flow_vs_closed_form", rms <= tol,
                       f"RMS relative deviation {rms:.3e} over |w|<=5*omega_cr "
                       f"(tol {tol:.2e}, n={n_realizations})")


def check_scaling_invariance(n_realizations: int = 64, workers: int = 1,
                             base_seed: int = 5150) -> CheckResult:
    """(T1, T2) -> (100 T1, 100 T2) with matched seeds: exact invariance."""
    p0 = _fig_rates(0.0, 1.0)
    cr = analytic.coupling_landmarks(p0).omega_cr
    p = replace(p0, coupling=1.2 * cr)
    config = sde.default_sim_config(p, base_seed=base_seed,
                                    n_realizations=n_realizations)
    report = criticality.temperature_ratio_invariance(p, 100.0, config,
                                                      workers=workers)
    ok = (report.omega_max_identical
          and report.max_relative_spectrum_deviation <= 1e-10
          and report.dispersion_base == report.dispersion_scaled)
    return CheckResult("temperature_scaling_invariance", ok,
                       f"omega_max identical: {report.omega_max_identical}, "
                       f"spectrum ratio dev {report.max_relative_spectrum_deviation:.3e}"
                       " (tol 1e-10)")


def run_verification(n_realizations: int = 400, workers: int = 1,
                     base_seed: int = 2024) -> list[CheckResult]:
    """Run every cross-oracle check; returns one result per check."""
    return [
        check_spectrum_equivalence(),
        check_lyapunov_residual(),
        check_wiener_khinchin(),
        check_omega_max_vs_potential(),
        check_splitting_criteria(),
        check_increment_consistency(),
        check_ensemble_flow(n_realizations=n_realizations, workers=workers,
                            base_seed=base_seed),
        check_scaling_invariance(workers=workers, base_seed=base_seed),
    ]
