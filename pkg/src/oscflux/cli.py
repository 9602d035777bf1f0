"""Batch front end: structured YAML config in, CSV out.

Subcommands
-----------
analytic   closed-form spectra, flow, potential, eigenvalues, landmarks and
           splitting couplings
simulate   ensemble run with averaged spectra/flow plus optional
           per-realization dumps
sweep      dispersion of the order parameter over a coupling sweep
fit        critical-exponent fit from a sweep CSV
verify     cross-oracle self-check battery

Exit codes: 0 success, 1 config error, 2 numerical failure, 3 verification
failure.  Errors additionally emit one machine-readable JSON line on stderr.
Every CSV starts with a comment line recording the fully resolved config,
and reruns with identical config and base seed are byte-identical for any
worker count.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import analytic, criticality, verify as verify_mod
from .model import InvalidParamsError, OscillatorPairParams, validate
from .lyapunov import UnstableSystemError
from .sde import SCHEMES, SimConfig, simulate_block
from .spectral import ESTIMATORS, WINDOWS, SpectralOptions

__all__ = ["main", "ConfigError"]

ENV_OUTPUT_DIR = "OSCFLUX_OUTPUT_DIR"


class ConfigError(ValueError):
    """Any problem with the run configuration (exit code 1)."""


class NumericalFailure(RuntimeError):
    """Numerical breakdown during a run (exit code 2)."""


# ---------------------------------------------------------------------------
# config handling

_BLOCK_KEYS = {
    "params": {"gamma1", "gamma2", "coupling", "temp1", "temp2"},
    "sim": {"dt", "t_burn", "t_f", "scheme", "n_realizations", "base_seed"},
    "spectral": {"window", "half_width", "estimator"},
    "analytic": {"freq_half_width", "freq_points", "extra_couplings",
                 "ratio_sweep"},
    "criticality": {"couplings", "fit_window", "side", "flow_sign",
                    "sweep_csv"},
    "output": {"directory", "dump_trajectories", "dump_flow_realizations"},
    "run": {"workers"},
    "verify": {"n_realizations"},
}


def _fail(msg: str) -> "ConfigError":
    return ConfigError(msg)


def _check_keys(block: dict, name: str) -> None:
    unknown = set(block) - _BLOCK_KEYS[name]
    if unknown:
        raise _fail(f"unknown key(s) in [{name}]: {sorted(unknown)}")


def _as_float(block: dict, key: str, context: str, default=None):
    if key not in block:
        if default is None:
            raise _fail(f"[{context}] missing required key {key!r}")
        return default
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise _fail(f"[{context}] {key} must be a number, got {v!r}")
    return float(v)


def _as_int(block: dict, key: str, context: str, default=None):
    if key not in block:
        return default
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise _fail(f"[{context}] {key} must be an integer, got {v!r}")
    return v


def load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise _fail(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise _fail(f"config is not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise _fail("config root must be a mapping of blocks")
    unknown = set(raw) - set(_BLOCK_KEYS)
    if unknown:
        raise _fail(f"unknown config block(s): {sorted(unknown)}")
    for name, block in raw.items():
        if not isinstance(block, dict):
            raise _fail(f"config block [{name}] must be a mapping")
        _check_keys(block, name)
    return raw


def _resolve_params(raw: dict, *, need_coupling: bool = True) -> OscillatorPairParams:
    block = raw.get("params")
    if block is None:
        raise _fail("missing [params] block")
    coupling = _as_float(block, "coupling", "params",
                         default=0.0 if not need_coupling else None)
    params = OscillatorPairParams(
        gamma1=_as_float(block, "gamma1", "params"),
        gamma2=_as_float(block, "gamma2", "params"),
        coupling=coupling,
        temp1=_as_float(block, "temp1", "params"),
        temp2=_as_float(block, "temp2", "params"),
    )
    try:
        return validate(params)
    except InvalidParamsError as exc:
        raise _fail(f"invalid [params]: {exc}") from exc


def _resolve_sim(raw: dict, params: OscillatorPairParams,
                 rate_scale: float | None = None) -> SimConfig:
    block = dict(raw.get("sim", {}))
    scheme = block.get("scheme", "exact_ou")
    if scheme not in SCHEMES:
        raise _fail(f"[sim] scheme must be one of {SCHEMES}")
    n_real = _as_int(block, "n_realizations", "sim", default=2000)
    seed = _as_int(block, "base_seed", "sim", default=0)
    if n_real is None or n_real < 1:
        raise _fail("[sim] n_realizations must be a positive integer")
    fast = rate_scale or max(params.gamma1, params.gamma2, params.coupling)
    slow = min(g for g in (params.gamma1, params.gamma2) if g > 0)
    cfg = SimConfig(
        dt=_as_float(block, "dt", "sim", default=0.02 / fast),
        t_burn=_as_float(block, "t_burn", "sim", default=20.0 / slow),
        t_f=_as_float(block, "t_f", "sim", default=200.0 / slow),
        scheme=scheme, base_seed=seed, n_realizations=n_real)
    if cfg.dt <= 0 or cfg.t_f <= 0 or cfg.t_burn < 0 or cfg.n_samples < 2:
        raise _fail("[sim] needs dt > 0, t_burn >= 0 and round(t_f/dt) >= 2")
    return cfg


def _resolve_spectral(raw: dict) -> SpectralOptions:
    block = raw.get("spectral", {})
    window = block.get("window", "rectangular")
    estimator = block.get("estimator", "cross_periodogram")
    if window not in WINDOWS:
        raise _fail(f"[spectral] window must be one of {WINDOWS}")
    if estimator not in ESTIMATORS:
        raise _fail(f"[spectral] estimator must be one of {ESTIMATORS}")
    half_width = block.get("half_width")
    if half_width is not None:
        half_width = _as_float(block, "half_width", "spectral")
        if half_width <= 0:
            raise _fail("[spectral] half_width must be positive")
    return SpectralOptions(window=window, half_width=half_width,
                           estimator=estimator)


def _resolve_couplings(raw: dict, params: OscillatorPairParams) -> np.ndarray:
    block = raw.get("criticality", {})
    spec = block.get("couplings", {})
    if not isinstance(spec, dict):
        raise _fail("[criticality] couplings must be a mapping")
    unknown = set(spec) - {"values", "n_per_side", "lo_rel", "hi_rel"}
    if unknown:
        raise _fail(f"unknown key(s) in [criticality] couplings: {sorted(unknown)}")
    cr = analytic.coupling_landmarks(params).omega_cr
    if "values" in spec:
        values = np.asarray(spec["values"], dtype=float)
        if values.ndim != 1 or len(values) == 0 or np.any(values < 0):
            raise _fail("[criticality] couplings values must be non-negative")
        return values
    n_side = spec.get("n_per_side", 25)
    lo = spec.get("lo_rel", 0.05)
    hi = spec.get("hi_rel", 0.5)
    if not (0 < lo < hi):
        raise _fail("[criticality] couplings need 0 < lo_rel < hi_rel")
    offsets = np.geomspace(lo, hi, n_side) * cr
    return np.sort(np.concatenate([cr - offsets, cr + offsets]))


def _resolve_flow_sign(raw: dict, params: OscillatorPairParams) -> float | None:
    block = raw.get("criticality", {})
    sign = block.get("flow_sign")
    if sign is None:
        return None
    if sign not in (1, -1):
        raise _fail("[criticality] flow_sign must be 1 or -1")
    return float(sign)


def _resolve_workers(raw: dict) -> int:
    w = _as_int(raw.get("run", {}), "workers", "run", default=os.cpu_count() or 1)
    if w < 1:
        raise _fail("[run] workers must be >= 1")
    return w


def _resolve_output_dir(raw: dict) -> Path:
    env = os.environ.get(ENV_OUTPUT_DIR)
    if env:
        return Path(env)
    return Path(raw.get("output", {}).get("directory", "out"))


def _stamp(raw: dict, resolved: dict) -> dict:
    # the stamp records everything that determines the numbers; worker
    # count and output location must not break byte-identical reruns
    physics = {k: v for k, v in raw.items() if k not in ("run", "output")}
    return {"config": physics, "resolved": resolved}


# ---------------------------------------------------------------------------
# CSV output

def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path: Path, header: list[str], rows, stamp: dict) -> None:
    lines = ["# config: " + json.dumps(stamp, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_analytic(raw: dict) -> int:
    params = _resolve_params(raw)
    block = raw.get("analytic", {})
    marks = analytic.coupling_landmarks(params)
    half = _as_float(block, "freq_half_width", "analytic",
                     default=5.0 * marks.omega_cr)
    n_pts = _as_int(block, "freq_points", "analytic", default=4001)
    if n_pts < 3 or half <= 0:
        raise _fail("[analytic] needs freq_points >= 3 and freq_half_width > 0")
    extra = block.get("extra_couplings", [])
    if not isinstance(extra, list) or any(
            isinstance(c, bool) or not isinstance(c, (int, float)) or c < 0
            for c in extra):
        raise _fail("[analytic] extra_couplings must be non-negative numbers")
    ratio_spec = block.get("ratio_sweep")
    if ratio_spec is not None:
        unknown = set(ratio_spec) - {"lo", "hi", "n"}
        if unknown:
            raise _fail(f"unknown key(s) in [analytic] ratio_sweep: {sorted(unknown)}")

    out = _resolve_output_dir(raw)
    out.mkdir(parents=True, exist_ok=True)
    resolved = {"freq_half_width": half, "freq_points": n_pts,
                "params": vars(params).copy()}
    stamp = _stamp(raw, resolved)

    freqs = np.linspace(-half, half, n_pts)

    write_csv(out / "landmarks.csv", ["omega_ep", "omega_cr"],
              [(marks.omega_ep, marks.omega_cr)], stamp)

    modes = analytic.modal_decomposition(params)
    write_csv(out / "eigenvalues.csv",
              ["lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im",
               "coalescent"],
              [(modes.lambda1.real, modes.lambda1.imag,
                modes.lambda2.real, modes.lambda2.imag,
                int(modes.coalescent))], stamp)

    def spectrum_rows(p):
        s = analytic.spectrum_closed_form(p, freqs)
        return zip(freqs, s[:, 0, 0].real, s[:, 1, 1].real,
                   s[:, 0, 1].real, s[:, 0, 1].imag)

    write_csv(out / "spectrum.csv",
              ["omega", "S11", "S22", "ReS12", "ImS12"],
              spectrum_rows(params), stamp)
    for j, om in enumerate(extra):
        pj = OscillatorPairParams(params.gamma1, params.gamma2, float(om),
                                  params.temp1, params.temp2)
        write_csv(out / f"spectrum_om{j}.csv",
                  ["omega", "S11", "S22", "ReS12", "ImS12"],
                  spectrum_rows(pj), stamp)

    flow = analytic.energy_flow_spectrum(params, freqs)
    write_csv(out / "flow.csv", ["omega", "J"], zip(freqs, flow), stamp)

    phi = analytic.phi_potential(params, freqs)
    write_csv(out / "phi.csv", ["omega", "Phi"], zip(freqs, phi), stamp)

    rows = []
    for osc in (1, 2):
        for crit in ("curvature", "peak_count"):
            val = analytic.splitting_coupling(params, osc, criterion=crit)
            rows.append((osc, crit,
                         np.nan if val is None else val,
                         np.nan if val is None or marks.omega_ep == 0
                         else val / marks.omega_ep))
    write_csv(out / "splitting.csv",
              ["oscillator", "criterion", "omega_split", "omega_split_rel_ep"],
              rows, stamp)

    if ratio_spec is not None:
        lo = _as_float(ratio_spec, "lo", "analytic.ratio_sweep", default=0.0)
        hi = _as_float(ratio_spec, "hi", "analytic.ratio_sweep", default=4.0)
        n = _as_int(ratio_spec, "n", "analytic.ratio_sweep", default=41)
        if not (0 <= lo < hi) or n < 2:
            raise _fail("[analytic] ratio_sweep needs 0 <= lo < hi and n >= 2")
        ratios = np.linspace(lo, hi, n)
        rows = []
        for r in ratios:
            pr = OscillatorPairParams(params.gamma1, params.gamma2,
                                      params.coupling, 1.0, float(r))
            s1 = analytic.splitting_coupling(pr, 1)
            s2 = analytic.splitting_coupling(pr, 2)
            rows.append((r,
                         np.nan if s1 is None else s1,
                         np.nan if s2 is None else s2))
        write_csv(out / "splitting_vs_ratio.csv",
                  ["temp_ratio", "omega1_split", "omega2_split"], rows, stamp)
    return 0


def _cmd_simulate(raw: dict) -> int:
    params = _resolve_params(raw)
    sim = _resolve_sim(raw, params)
    opts = _resolve_spectral(raw)
    workers = _resolve_workers(raw)
    out_block = raw.get("output", {})
    n_traj = _as_int(out_block, "dump_trajectories", "output", default=0)
    n_flow = _as_int(out_block, "dump_flow_realizations", "output", default=0)

    out = _resolve_output_dir(raw)
    out.mkdir(parents=True, exist_ok=True)
    resolved = {"params": vars(params).copy(), "sim": vars(sim).copy(),
                "spectral": vars(opts).copy()}
    stamp = _stamp(raw, resolved)

    res = criticality.flow_ensemble(params, sim, opts,
                                    keep_realizations=n_flow, workers=workers)
    if not np.all(np.isfinite(res.components)):
        raise NumericalFailure("non-finite values in averaged spectra")

    comp, se = res.components, res.components_stderr
    write_csv(out / "spectra.csv", ["omega", "S11", "S22", "ReS12", "ImS12"],
              zip(res.freqs, comp[:, 0], comp[:, 1], comp[:, 2], comp[:, 3]),
              stamp)
    write_csv(out / "spectra_stderr.csv",
              ["omega", "S11", "S22", "ReS12", "ImS12"],
              zip(res.freqs, se[:, 0], se[:, 1], se[:, 2], se[:, 3]), stamp)
    write_csv(out / "flow.csv", ["omega", "J_mean", "J_stderr"],
              zip(res.freqs, res.flow_mean, res.flow_stderr), stamp)
    for k, flow in sorted(res.kept_flows.items()):
        write_csv(out / f"flow_realization_{k}.csv", ["omega", "J"],
                  zip(res.freqs, flow), stamp)

    if n_traj:
        from .model import build_system
        p_norm, t_ref = criticality.normalized_params(params)
        amp = np.sqrt(t_ref)
        samples = simulate_block(build_system(p_norm), sim, 0, n_traj)
        t = (np.arange(sim.n_samples) + sim.n_burn + 1) * sim.dt
        for k in range(n_traj):
            a = samples[k] * amp
            write_csv(out / f"trajectory_{k}.csv",
                      ["t", "re_a1", "im_a1", "re_a2", "im_a2"],
                      zip(t, a[:, 0].real, a[:, 0].imag,
                          a[:, 1].real, a[:, 1].imag), stamp)
    return 0


def _cmd_sweep(raw: dict) -> int:
    params = _resolve_params(raw, need_coupling=False)
    couplings = _resolve_couplings(raw, params)
    sim = _resolve_sim(raw, params,
                       rate_scale=max(params.gamma1, params.gamma2,
                                      float(couplings.max())))
    opts = _resolve_spectral(raw)
    workers = _resolve_workers(raw)
    flow_sign = _resolve_flow_sign(raw, params)

    out = _resolve_output_dir(raw)
    out.mkdir(parents=True, exist_ok=True)
    resolved = {"params": vars(params).copy(), "sim": vars(sim).copy(),
                "spectral": vars(opts).copy(),
                "couplings": list(map(float, couplings))}
    stamp = _stamp(raw, resolved)

    sweep = criticality.dispersion_sweep(params, couplings, sim, opts,
                                         flow_sign=flow_sign, workers=workers)
    if not np.all(np.isfinite(sweep.dispersion)):
        raise NumericalFailure("non-finite dispersion in sweep")
    write_csv(out / "sweep.csv",
              ["omega_coupling", "mean_omega_max", "disp_omega_max",
               "disp_stderr", "n"],
              zip(sweep.couplings, sweep.mean_omega_max, sweep.dispersion,
                  sweep.dispersion_stderr, sweep.n), stamp)
    return 0


def _read_sweep_csv(path: Path, params: OscillatorPairParams):
    if not path.is_file():
        raise _fail(f"sweep CSV not found: {path}")
    rows = [ln for ln in path.read_text().splitlines()
            if ln and not ln.startswith("#")]
    header = rows[0].split(",")
    need = ["omega_coupling", "mean_omega_max", "disp_omega_max",
            "disp_stderr", "n"]
    if header != need:
        raise _fail(f"sweep CSV columns {header} != {need}")
    data = np.array([[float(x) for x in ln.split(",")] for ln in rows[1:]])
    if data.size == 0:
        raise _fail("sweep CSV has no data rows")
    return criticality.CriticalitySweep(
        params=params, omega_cr=analytic.coupling_landmarks(params).omega_cr,
        couplings=data[:, 0], mean_omega_max=data[:, 1],
        mean_omega_max_sq=data[:, 2] + data[:, 1] ** 2,
        dispersion=data[:, 2], dispersion_stderr=data[:, 3],
        mean_stderr=np.full(len(data), np.nan), n=data[:, 4].astype(int),
        samples=[])


def _cmd_fit(raw: dict) -> int:
    params = _resolve_params(raw, need_coupling=False)
    block = raw.get("criticality", {})
    csv_path = block.get("sweep_csv")
    if not csv_path:
        raise _fail("[criticality] sweep_csv is required for the fit command")
    window = tuple(block.get("fit_window", (0.05, 0.5)))
    if len(window) != 2:
        raise _fail("[criticality] fit_window must be [lo, hi]")
    side = block.get("side", "below")
    if side not in criticality.FIT_SIDES:
        raise _fail(f"[criticality] side must be one of {criticality.FIT_SIDES}")

    sweep = _read_sweep_csv(Path(csv_path), params)
    out = _resolve_output_dir(raw)
    out.mkdir(parents=True, exist_ok=True)
    stamp = _stamp(raw, {"window": list(window), "side": side,
                         "sweep_csv": str(csv_path)})
    try:
        fit = criticality.fit_critical_exponent(sweep, window=window, side=side)
    except ValueError as exc:
        raise NumericalFailure(str(exc)) from exc
    write_csv(out / "fit.csv",
              ["alpha", "alpha_stderr", "r2", "window_lo", "window_hi", "side"],
              [(fit.exponent, fit.exponent_stderr, fit.r_squared,
                fit.window[0], fit.window[1], fit.side)], stamp)
    return 0


def _cmd_verify(raw: dict) -> int:
    if "params" in raw:
        _resolve_params(raw)  # validated; the battery runs its own regimes
    workers = _resolve_workers(raw)
    n_real = _as_int(raw.get("verify", {}), "n_realizations", "verify",
                     default=400)
    sim_block = raw.get("sim", {})
    seed = _as_int(sim_block, "base_seed", "sim", default=2024)
    results = verify_mod.run_verification(n_realizations=n_real,
                                          workers=workers, base_seed=seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return 0 if all(r.passed for r in results) else 3


_COMMANDS = {
    "analytic": _cmd_analytic,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "fit": _cmd_fit,
    "verify": _cmd_verify,
}


def _emit_error(kind: str, code: int, message: str) -> None:
    line = json.dumps({"error": kind, "code": code, "message": message})
    print(line, file=sys.stderr)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="oscflux",
        description="Coupled thermally driven oscillators: spectra, "
                    "energy flow and critical-point analysis.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="YAML run configuration")
    args = parser.parse_args(argv)

    try:
        raw = load_config(args.config)
        code = _COMMANDS[args.command](raw)
    except ConfigError as exc:
        _emit_error("config", 1, str(exc))
        return 1
    except (NumericalFailure, UnstableSystemError, FloatingPointError) as exc:
        _emit_error("numerical", 2, str(exc))
        return 2
    if code == 3:
        _emit_error("verification", 3, "one or more verification checks failed")
    return code


if __name__ == "__main__":
    sys.exit(main())
