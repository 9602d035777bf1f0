"""Spectral estimation from simulated trajectories.

The finite-window estimator uses the amplitude transform

    b_i(w) = dt * sum_t a_i(t) e^{+i w t}

on the recorded window of length t_f = n dt (rectangular window by default,
no detrending), and the spectrum-matrix estimator

    S_ij(w) = conj(b_i(w)) b_j(w) / (2 pi t_f),

whose ensemble expectation converges to the closed-form spectrum matrix as
the window grows.  The e^{+i w t} kernel is what makes the imaginary part of
the off-diagonal element converge to the hot-to-cold energy-flow spectrum
with its conventional sign; the normalization is pinned by a machine-checked
test against the closed form, not by convention alone.

The per-realization energy-flow spectrum is J(w) = Im S_12(w) from the
cross-periodogram of the same realization.  (The alternative reading --
transforming the quadratic series Im(a1*(t) a2(t)) -- is available as
``estimator="quadratic_series"`` for comparison only; its mean does not
reproduce the closed-form flow.)

Frequency grids are symmetric about zero with spacing 2 pi / t_f; for an
even sample count the single unpaired most-negative bin (at the Nyquist
edge, far outside any physics here) is dropped.

All ensemble reductions are keyed by realization index and accumulated in
fixed blocks, so averaged results are byte-identical for any worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import LinearSystem
from .sde import SIM_BLOCK, SimConfig, Trajectory, simulate_block, validate_config

__all__ = [
    "SpectralGrid",
    "SpectralOptions",
    "EnsembleSpectra",
    "periodogram_matrix",
    "flow_spectrum_realization",
    "average_spectra",
    "ensemble_spectra",
]

WINDOWS = ("rectangular", "hann")
ESTIMATORS = ("cross_periodogram", "quadratic_series")


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform symmetric frequency grid with a per-frequency payload.

    ``values`` has shape (n, 2, 2) complex for full spectrum matrices or
    (n,) real for flow spectra.  ``df`` is the grid spacing 2 pi / t_f.
    """

    freqs: np.ndarray
    values: np.ndarray
    df: float

    def restrict(self, half_width: float) -> "SpectralGrid":
        """Sub-grid with |freq| <= half_width (keeps symmetry)."""
        keep = np.abs(self.freqs) <= half_width
        return SpectralGrid(self.freqs[keep], self.values[keep], self.df)


@dataclass(frozen=True)
class SpectralOptions:
    """Estimator configuration shared by the per-trajectory operations."""

    window: str = "rectangular"
    half_width: float | None = None
    estimator: str = "cross_periodogram"

    def validated(self) -> "SpectralOptions":
        if self.window not in WINDOWS:
            raise ValueError(f"unknown window {self.window!r}")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.half_width is not None and self.half_width <= 0:
            raise ValueError("half_width must be positive")
        return self


def _grid_layout(n: int, dt: float) -> tuple[np.ndarray, slice]:
    """Symmetric ascending frequency grid and the slice selecting it.

    For even n the fftshifted layout has one extra negative bin at the
    Nyquist edge with no positive partner; it is dropped.
    """
    freqs = np.fft.fftshift(2.0 * np.pi * np.fft.fftfreq(n, d=dt))
    sl = slice(1, None) if n % 2 == 0 else slice(None)
    return freqs[sl], sl


def _window_array(n: int, window: str) -> np.ndarray | None:
    if window == "rectangular":
        return None
    w = np.hanning(n)
    return w / np.sqrt(np.mean(w * w))


def _amplitude_transform(samples: np.ndarray, dt: float, window: str):
    """b(w) = dt * sum_t a(t) e^{+iwt} on the shifted symmetric grid.

    ``samples`` may be (n, 2) or batched (m, n, 2); the transform always
    runs along the time axis.
    """
    n = samples.shape[-2]
    if n < 2:
        raise ValueError("trajectory must have at least 2 samples")
    win = _window_array(n, window)
    x = samples if win is None else samples * win[:, None]
    b = np.fft.ifft(x, axis=-2) * (n * dt)
    freqs, sl = _grid_layout(n, dt)
    b = np.fft.fftshift(b, axes=-2)[..., sl, :]
    return freqs, b


def _components_from_transform(b: np.ndarray, t_eff: float) -> np.ndarray:
    """Real components [S11, S22, Re S12, Im S12], shape b.shape[:-1] + (4,)."""
    norm = 1.0 / (2.0 * np.pi * t_eff)
    cross = np.conj(b[..., 0]) * b[..., 1]
    out = np.empty(b.shape[:-1] + (4,), dtype=float)
    out[..., 0] = (b[..., 0].real ** 2 + b[..., 0].imag ** 2) * norm
    out[..., 1] = (b[..., 1].real ** 2 + b[..., 1].imag ** 2) * norm
    out[..., 2] = cross.real * norm
    out[..., 3] = cross.imag * norm
    return out


def _matrix_from_components(comp: np.ndarray) -> np.ndarray:
    s = np.empty(comp.shape[:-1] + (2, 2), dtype=complex)
    s[..., 0, 0] = comp[..., 0]
    s[..., 1, 1] = comp[..., 1]
    s12 = comp[..., 2] + 1j * comp[..., 3]
    s[..., 0, 1] = s12
    s[..., 1, 0] = np.conj(s12)
    return s


def periodogram_matrix(traj: Trajectory, window: str = "rectangular") -> SpectralGrid:
    """Spectrum-matrix estimate of a single realization.

    The result is exactly Hermitian and positive semi-definite (rank one)
    at every frequency; its ensemble mean converges to the closed-form
    spectrum matrix.
    """
    freqs, b = _amplitude_transform(traj.samples, traj.dt, window)
    n = traj.samples.shape[0]
    comp = _components_from_transform(b, n * traj.dt)
    df = 2.0 * np.pi / (n * traj.dt)
    return SpectralGrid(freqs, _matrix_from_components(comp), df)


def flow_spectrum_realization(traj: Trajectory, window: str = "rectangular",
                              estimator: str = "cross_periodogram") -> SpectralGrid:
    """Energy-flow spectrum J(w) of a single realization (real grid)."""
    n = traj.samples.shape[0]
    t_eff = n * traj.dt
    df = 2.0 * np.pi / t_eff
    if estimator == "cross_periodogram":
        freqs, b = _amplitude_transform(traj.samples, traj.dt, window)
        comp = _components_from_transform(b, t_eff)
        return SpectralGrid(freqs, comp[..., 3], df)
    if estimator == "quadratic_series":
        j_t = np.imag(np.conj(traj.samples[:, 0]) * traj.samples[:, 1])
        freqs, b = _amplitude_transform(j_t[:, None], traj.dt, window)
        return SpectralGrid(freqs, np.abs(b[..., 0]) / t_eff, df)
    raise ValueError(f"unknown estimator {estimator!r}")


class _BlockAccumulator:
    """Streaming mean/stderr with a fixed, order-independent summation tree.

    Values are summed within consecutive index blocks of ``block`` entries;
    finished block sums are added to the running total in block order.  The
    final totals are therefore bit-identical however the values were
    batched or scheduled, as long as they arrive keyed by index.
    """

    def __init__(self, shape: tuple, block: int = SIM_BLOCK):
        self.block = block
        self.count = 0
        self._sum = np.zeros(shape)
        self._sumsq = np.zeros(shape)
        self._buf_sum = np.zeros(shape)
        self._buf_sumsq = np.zeros(shape)
        self._buf_n = 0

    def add(self, value: np.ndarray) -> None:
        self._buf_sum += value
        self._buf_sumsq += value * value
        self._buf_n += 1
        if self._buf_n == self.block:
            self._flush()

    def add_block(self, block_sum, block_sumsq, n) -> None:
        """Merge a precomputed whole block (must arrive in index order)."""
        if self._buf_n:
            raise RuntimeError("cannot mix add() and add_block() mid-block")
        self._sum += block_sum
        self._sumsq += block_sumsq
        self.count += n

    def _flush(self) -> None:
        if self._buf_n:
            self._sum += self._buf_sum
            self._sumsq += self._buf_sumsq
            self.count += self._buf_n
            self._buf_sum[...] = 0.0
            self._buf_sumsq[...] = 0.0
            self._buf_n = 0

    def finalize(self) -> tuple[np.ndarray, np.ndarray]:
        """(mean, standard error of the mean)."""
        self._flush()
        n = self.count
        if n == 0:
            raise ValueError("no values accumulated")
        mean = self._sum / n
        if n == 1:
            return mean, np.full_like(mean, np.nan)
        var = np.maximum(self._sumsq / n - mean * mean, 0.0) * (n / (n - 1.0))
        return mean, np.sqrt(var / n)


def average_spectra(grids) -> tuple[SpectralGrid, SpectralGrid]:
    """Pointwise mean and standard error of a stream of matching grids.

    All grids must share identical frequency axes.  For complex matrix
    grids the standard error is computed on real and imaginary parts
    separately and returned as ``se_re + 1j * se_im``.
    """
    it = iter(grids)
    try:
        first = next(it)
    except StopIteration:
        raise ValueError("empty grid stream") from None

    complex_payload = np.iscomplexobj(first.values)

    def as_real(v):
        return np.stack([v.real, v.imag], axis=-1) if complex_payload else v

    acc = _BlockAccumulator(as_real(first.values).shape)
    acc.add(as_real(first.values))
    for g in it:
        if g.values.shape != first.values.shape or not np.array_equal(g.freqs, first.freqs):
            raise ValueError("grid mismatch in average_spectra")
        acc.add(as_real(g.values))
    mean, se = acc.finalize()
    if complex_payload:
        mean = mean[..., 0] + 1j * mean[..., 1]
        se = se[..., 0] + 1j * se[..., 1]
    return (SpectralGrid(first.freqs, mean, first.df),
            SpectralGrid(first.freqs, se, first.df))


@dataclass(frozen=True)
class EnsembleSpectra:
    """Ensemble-averaged spectra with standard errors.

    ``components``/``components_stderr`` hold the real quadruple
    [S11, S22, Re S12, Im S12] per frequency; the flow spectrum mean is
    component 3.  ``kept_flows`` maps realization index to its individual
    flow spectrum (for the first ``keep_realizations`` realizations).
    ``omega_max`` is the per-realization order-parameter array when
    extraction was requested, else None.
    """

    freqs: np.ndarray
    df: float
    components: np.ndarray | None
    components_stderr: np.ndarray | None
    n: int
    kept_flows: dict[int, np.ndarray]
    omega_max: np.ndarray | None

    @property
    def matrix_mean(self) -> np.ndarray:
        return _matrix_from_components(self.components)

    @property
    def flow_mean(self) -> np.ndarray:
        return self.components[:, 3]

    @property
    def flow_stderr(self) -> np.ndarray:
        return self.components_stderr[:, 3]

    def flow_grid(self) -> SpectralGrid:
        return SpectralGrid(self.freqs, self.flow_mean, self.df)


def _block_payload(system: LinearSystem, config: SimConfig,
                   opts: SpectralOptions, i0: int, i1: int, stream: int,
                   flow_sign: float | None, keep_below: int,
                   accumulate: bool):
    """Per-block reduction: component sums, optional omega_max, kept flows."""
    from .criticality import refine_argmax  # local import; no cycle at module load

    samples = simulate_block(system, config, i0, i1, stream)
    freqs, b = _amplitude_transform(samples, config.dt, opts.window)
    t_eff = samples.shape[1] * config.dt
    if accumulate:
        comp = _components_from_transform(b, t_eff)
        flow = comp[..., 3]
    else:
        # flow-only mode (dispersion sweeps): skip the other components but
        # keep the arithmetic identical to the full route
        comp = None
        norm = 1.0 / (2.0 * np.pi * t_eff)
        flow = (np.conj(b[..., 0]) * b[..., 1]).imag * norm
    if opts.half_width is not None:
        keep = np.abs(freqs) <= opts.half_width
        freqs = freqs[keep]
        flow = flow[:, keep]
        comp = comp[:, keep, :] if comp is not None else None

    block_sum = block_sumsq = None
    if accumulate:
        # comp has shape (block, n_freq, 4); straight per-block sums in
        # index order define the reduction tree.
        block_sum = np.zeros(comp.shape[1:])
        block_sumsq = np.zeros(comp.shape[1:])
        for row in comp:
            block_sum += row
            block_sumsq += row * row

    omax = None
    if flow_sign is not None:
        omax = np.array([refine_argmax(freqs, flow_sign * flow[k])
                         for k in range(flow.shape[0])])
    kept = {}
    for k in range(i0, min(i1, keep_below)):
        kept[k] = flow[k - i0].copy()
    return i0, freqs, block_sum, block_sumsq, i1 - i0, omax, kept


def ensemble_spectra(system: LinearSystem, config: SimConfig,
                     opts: SpectralOptions | None = None, *,
                     flow_sign: float | None = None,
                     keep_realizations: int = 0,
                     workers: int = 1,
                     stream: int = 0,
                     accumulate_spectra: bool = True,
                     executor: ProcessPoolExecutor | None = None) -> EnsembleSpectra:
    """Simulate an ensemble and average its spectra in one streamed pass.

    Parameters
    ----------
    flow_sign : float, optional
        When given (+1 or -1), the per-realization order parameter
        omega_max = argmax of flow_sign * J(w) is extracted for every
        realization and returned as an array.
    keep_realizations : int
        Keep the individual flow spectra of realizations with index below
        this value (for single-realization diagnostics).
    workers : int
        Process count; results are byte-identical for any value.
    accumulate_spectra : bool
        When False only the flow column is computed per realization (for
        order-parameter sweeps); ``components`` is then None.
    executor : ProcessPoolExecutor, optional
        Reuse an existing pool (callers running many ensembles); overrides
        ``workers``.
    """
    opts = (opts or SpectralOptions()).validated()
    validate_config(system, config)
    n = config.n_realizations
    bounds = [(i0, min(i0 + SIM_BLOCK, n)) for i0 in range(0, n, SIM_BLOCK)]

    results = {}
    own_pool = None
    pool = executor
    if pool is None and workers > 1 and len(bounds) > 1:
        own_pool = ProcessPoolExecutor(max_workers=workers)
        pool = own_pool
    try:
        if pool is not None:
            futs = [pool.submit(_block_payload, system, config, opts, i0, i1,
                                stream, flow_sign, keep_realizations,
                                accumulate_spectra)
                    for i0, i1 in bounds]
            for fut in futs:
                payload = fut.result()
                results[payload[0]] = payload
        else:
            for i0, i1 in bounds:
                payload = _block_payload(system, config, opts, i0, i1, stream,
                                         flow_sign, keep_realizations,
                                         accumulate_spectra)
                results[payload[0]] = payload
    finally:
        if own_pool is not None:
            own_pool.shutdown()

    acc = None
    freqs = None
    omax_parts = []
    kept: dict[int, np.ndarray] = {}
    for i0 in sorted(results):
        _, f, bsum, bsumsq, count, omax, kept_part = results[i0]
        if freqs is None:
            freqs = f
        if accumulate_spectra:
            if acc is None:
                acc = _BlockAccumulator(bsum.shape)
            acc.add_block(bsum, bsumsq, count)
        if omax is not None:
            omax_parts.append(omax)
        kept.update(kept_part)

    mean = stderr = None
    if acc is not None:
        mean, stderr = acc.finalize()
    omega_max = np.concatenate(omax_parts) if omax_parts else None
    df = 2.0 * np.pi / (config.n_samples * config.dt)
    return EnsembleSpectra(freqs=freqs, df=df, components=mean,
                           components_stderr=stderr, n=n,
                           kept_flows=kept, omega_max=omega_max)
