"""Order-parameter statistics near the flow-spectrum splitting transition.

The frequency of the maximum of a single realization's energy-flow spectrum
J(w) is the order parameter.  Its dispersion across realizations,
D = <w_max^2> - <w_max>^2, grows as a power law |coupling - omega_cr|^alpha
near the critical coupling, and both D and alpha depend on the reservoir
temperatures only through their ratio.

That ratio-only dependence is built into the pipeline here: simulation runs
on the temperature-normalized system (temps divided by max(T1, T2), which
scales amplitudes by its square root and spectra linearly), and the overall
temperature scale multiplies the averaged spectra once at the end.  The
order parameter is extracted from the normalized flow spectra directly, so
rescaling all temperatures by a common factor with matched seeds reproduces
every omega_max sample bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .model import OscillatorPairParams, build_system, validate
from .analytic import coupling_landmarks
from .sde import SimConfig
from .spectral import EnsembleSpectra, SpectralGrid, SpectralOptions, ensemble_spectra

__all__ = [
    "CriticalitySweep",
    "PowerLawFit",
    "InvarianceReport",
    "refine_argmax",
    "extract_omega_max",
    "flow_ensemble",
    "dispersion_sweep",
    "fit_critical_exponent",
    "temperature_ratio_invariance",
]

FIT_SIDES = ("below", "above", "pooled")


def refine_argmax(freqs: np.ndarray, values: np.ndarray) -> float:
    """Grid argmax refined by 3-point parabolic interpolation.

    Exact ties are broken toward larger |frequency|, then toward the
    positive sign, making the result deterministic for symmetric inputs.
    No refinement is applied at the grid edges or on a degenerate
    (non-concave) neighborhood.
    """
    if len(values) == 0:
        raise ValueError("empty grid")
    top = np.flatnonzero(values == values.max())
    if len(top) == 1:
        k = int(top[0])
    else:
        # |frequency| compared in units of the grid spacing, so that the
        # +-omega partners of a symmetric grid (equal up to rounding) count
        # as tied and resolve by sign
        spacing = abs(freqs[1] - freqs[0])
        dist = np.rint(np.abs(freqs[top]) / spacing)
        order = np.lexsort((freqs[top], dist))
        k = int(top[order[-1]])
    if k == 0 or k == len(values) - 1:
        return float(freqs[k])
    ym, y0, yp = values[k - 1], values[k], values[k + 1]
    denom = ym - 2.0 * y0 + yp
    if denom >= 0.0:
        return float(freqs[k])
    shift = 0.5 * (ym - yp) / denom
    return float(freqs[k] + shift * (freqs[k + 1] - freqs[k]))


def extract_omega_max(flow: SpectralGrid, flow_sign: float) -> float:
    """Order parameter of one realization: argmax of flow_sign * J(w).

    ``flow_sign`` orients the flow (the sign of T2 - T1); it must be
    supplied explicitly because for equal temperatures the mean flow
    vanishes and the order parameter is undefined without a convention.
    """
    if flow_sign not in (-1, 1, -1.0, 1.0):
        raise ValueError(
            "flow_sign must be +1 or -1 (undefined order parameter otherwise)")
    return refine_argmax(flow.freqs, flow_sign * flow.values)


def _default_flow_sign(params: OscillatorPairParams) -> float:
    if params.temp1 == params.temp2:
        raise ValueError(
            "equal reservoir temperatures: supply flow_sign explicitly")
    return 1.0 if params.temp2 > params.temp1 else -1.0


def normalized_params(params: OscillatorPairParams) -> tuple[OscillatorPairParams, float]:
    """Divide both temperatures by max(T1, T2); returns (params, scale)."""
    t_ref = max(params.temp1, params.temp2)
    return replace(params, temp1=params.temp1 / t_ref,
                   temp2=params.temp2 / t_ref), t_ref


def flow_ensemble(params: OscillatorPairParams, config: SimConfig,
                  opts: SpectralOptions | None = None, *,
                  flow_sign: float | None = None,
                  collect_omega_max: bool = False,
                  keep_realizations: int = 0,
                  workers: int = 1,
                  stream: int = 0,
                  accumulate_spectra: bool = True,
                  executor=None) -> EnsembleSpectra:
    """Ensemble spectra of ``params`` via the temperature-normalized pipeline.

    Simulation and order-parameter extraction run at unit temperature scale;
    the averaged spectra (and kept per-realization flows) are multiplied by
    max(T1, T2) on the way out, per the exact amplitude scaling of the
    linear system.
    """
    p = validate(params)
    sign = None
    if collect_omega_max:
        sign = flow_sign if flow_sign is not None else _default_flow_sign(p)
    p_norm, t_ref = normalized_params(p)
    res = ensemble_spectra(build_system(p_norm), config, opts,
                           flow_sign=sign, keep_realizations=keep_realizations,
                           workers=workers, stream=stream,
                           accumulate_spectra=accumulate_spectra,
                           executor=executor)
    return EnsembleSpectra(
        freqs=res.freqs, df=res.df,
        components=None if res.components is None else res.components * t_ref,
        components_stderr=(None if res.components_stderr is None
                           else res.components_stderr * t_ref),
        n=res.n,
        kept_flows={k: v * t_ref for k, v in res.kept_flows.items()},
        omega_max=res.omega_max)


@dataclass(frozen=True)
class CriticalitySweep:
    """Per-coupling order-parameter statistics over independent ensembles."""

    params: OscillatorPairParams
    omega_cr: float
    couplings: np.ndarray
    mean_omega_max: np.ndarray
    mean_omega_max_sq: np.ndarray
    dispersion: np.ndarray
    dispersion_stderr: np.ndarray
    mean_stderr: np.ndarray
    n: np.ndarray
    samples: list[np.ndarray]


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares line in (log|coupling - omega_cr|, log D)."""

    exponent: float
    exponent_stderr: float
    amplitude: float
    r_squared: float
    window: tuple[float, float]
    side: str
    n_points: int


@dataclass(frozen=True)
class InvarianceReport:
    """Matched-seed comparison of a run against its temperature-scaled twin."""

    scale: float
    max_relative_spectrum_deviation: float
    omega_max_identical: bool
    dispersion_base: float
    dispersion_scaled: float
    n: int


def _dispersion_stats(samples: np.ndarray) -> tuple[float, float, float, float, float]:
    """(mean, mean_sq, dispersion, dispersion stderr, mean stderr).

    Dispersion uses the two-pass centered form; its standard error is the
    delta-method estimate sqrt((m4 - D^2)/n) from the centered fourth
    moment.
    """
    n = len(samples)
    mean = float(np.mean(samples))
    centered = samples - mean
    disp = float(np.mean(centered ** 2))
    mean_sq = float(np.mean(samples ** 2))
    m4 = float(np.mean(centered ** 4))
    disp_se = float(np.sqrt(max(m4 - disp * disp, 0.0) / n))
    mean_se = float(np.sqrt(disp / max(n - 1, 1)))
    return mean, mean_sq, disp, disp_se, mean_se


def dispersion_sweep(params: OscillatorPairParams, couplings,
                     config: SimConfig,
                     opts: SpectralOptions | None = None, *,
                     flow_sign: float | None = None,
                     workers: int = 1) -> CriticalitySweep:
    """Order-parameter statistics for each coupling in ``couplings``.

    Each coupling gets an independent ensemble of ``config.n_realizations``
    realizations (noise streams keyed by the coupling's position in the
    list), so the whole sweep is deterministic for a fixed base seed
    regardless of scheduling or worker count.
    """
    p = validate(params)
    if config.n_realizations < 2:
        raise ValueError("dispersion needs at least 2 realizations")
    sign = flow_sign if flow_sign is not None else _default_flow_sign(p)
    couplings = np.asarray(couplings, dtype=float)
    if couplings.ndim != 1 or len(couplings) == 0:
        raise ValueError("couplings must be a non-empty 1-d sequence")

    stats = []
    samples = []
    pool = None
    try:
        if workers > 1:
            from concurrent.futures import ProcessPoolExecutor
            pool = ProcessPoolExecutor(max_workers=workers)
        for j, om in enumerate(couplings):
            pj = replace(p, coupling=float(om))
            res = flow_ensemble(pj, config, opts, flow_sign=sign,
                                collect_omega_max=True, stream=j,
                                accumulate_spectra=False, executor=pool)
            samples.append(res.omega_max)
            stats.append(_dispersion_stats(res.omega_max))
    finally:
        if pool is not None:
            pool.shutdown()

    mean, mean_sq, disp, disp_se, mean_se = map(np.array, zip(*stats))
    return CriticalitySweep(
        params=p, omega_cr=coupling_landmarks(p).omega_cr,
        couplings=couplings, mean_omega_max=mean, mean_omega_max_sq=mean_sq,
        dispersion=disp, dispersion_stderr=disp_se, mean_stderr=mean_se,
        n=np.full(len(couplings), config.n_realizations, dtype=int),
        samples=samples)


def fit_critical_exponent(sweep: CriticalitySweep,
                          window: tuple[float, float] = (0.05, 0.5),
                          side: str = "below") -> PowerLawFit:
    """Power-law exponent of D(omega_max) vs |coupling - omega_cr|.

    ``window`` is in units of omega_cr and excludes the finite-size-violated
    core around the transition; ``side`` selects couplings below, above, or
    on both sides (pooled) of the critical point.
    """
    if side not in FIT_SIDES:
        raise ValueError(f"side must be one of {FIT_SIDES}")
    lo, hi = window
    if not (0 < lo < hi):
        raise ValueError("window must satisfy 0 < lo < hi")
    dist = sweep.couplings - sweep.omega_cr
    keep = (np.abs(dist) >= lo * sweep.omega_cr) & (np.abs(dist) <= hi * sweep.omega_cr)
    if side == "below":
        keep &= dist < 0
    elif side == "above":
        keep &= dist > 0
    if np.count_nonzero(keep) < 4:
        raise ValueError("fewer than 4 sweep points inside the fit window")
    d = sweep.dispersion[keep]
    if np.any(d <= 0):
        raise ValueError("non-positive dispersion inside the fit window")

    x = np.log(np.abs(dist[keep]))
    y = np.log(d)
    xbar, ybar = x.mean(), y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    slope = float(np.sum((x - xbar) * (y - ybar)) / sxx)
    intercept = ybar - slope * xbar
    resid = y - (intercept + slope * x)
    m = len(x)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - ybar) ** 2))
    stderr = float(np.sqrt(ss_res / (m - 2) / sxx)) if m > 2 else np.nan
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(exponent=slope, exponent_stderr=stderr,
                       amplitude=float(np.exp(intercept)), r_squared=r2,
                       window=(lo, hi), side=side, n_points=m)


def temperature_ratio_invariance(params: OscillatorPairParams, scale: float,
                                 config: SimConfig,
                                 opts: SpectralOptions | None = None, *,
                                 flow_sign: float | None = None,
                                 workers: int = 1) -> InvarianceReport:
    """Compare a run against (T1, T2) -> (scale T1, scale T2), matched seeds.

    The scaled spectra equal ``scale`` times the originals up to floating
    point; when the normalized temperature ratio is preserved exactly (for
    instance T1 = 0, or ratios exact in binary), every omega_max sample is
    bit-identical and so is the dispersion.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    p = validate(params)
    sign = flow_sign if flow_sign is not None else _default_flow_sign(p)
    p_scaled = replace(p, temp1=p.temp1 * scale, temp2=p.temp2 * scale)

    base = flow_ensemble(p, config, opts, flow_sign=sign,
                         collect_omega_max=True, workers=workers)
    scaled = flow_ensemble(p_scaled, config, opts, flow_sign=sign,
                           collect_omega_max=True, workers=workers)

    target = scale * base.components
    dev = np.abs(scaled.components - target) / (np.abs(target) + np.finfo(float).tiny)
    disp_base = _dispersion_stats(base.omega_max)[2]
    disp_scaled = _dispersion_stats(scaled.omega_max)[2]
    return InvarianceReport(
        scale=scale,
        max_relative_spectrum_deviation=float(dev.max()),
        omega_max_identical=bool(np.array_equal(base.omega_max, scaled.omega_max)),
        dispersion_base=disp_base,
        dispersion_scaled=disp_scaled,
        n=base.n)
