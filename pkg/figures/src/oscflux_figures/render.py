"""Render the five standard figures from oscflux CSV files.

fig1  oscillator fluctuation spectra for several coupling strengths
fig2  splitting couplings versus reservoir temperature ratio
fig3  ensemble-averaged flow spectrum with closed-form overlay
fig4  single-realization flow spectrum against the quartic potential
fig5  order-parameter dispersion sweeps and fitted exponents

Inputs are paths to CSVs produced by the ``oscflux`` CLI; their column
layout is validated against the documented schemas before anything is
drawn.  Output files are PNG, produced with the Agg backend at a fixed
size, DPI and metadata so that identical inputs give identical bytes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureError", "FigureSpec", "render", "FIGURES"]

_SAVEFIG = dict(dpi=150, metadata={"Software": "oscflux-figures"})


class FigureError(ValueError):
    """Missing input file or schema mismatch; no output is written."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: figure id, named input CSVs, output image path.

    ``inputs`` values are either a single path or a list of paths,
    depending on the figure; ``labels`` annotate list-valued inputs.
    """

    figure_id: str
    inputs: dict
    output: str
    labels: list = field(default_factory=list)


def read_csv(path, columns) -> dict:
    """Read an oscflux CSV, enforcing the exact expected column list."""
    p = Path(path)
    if not p.is_file():
        raise FigureError(f"input CSV not found: {path}")
    lines = [ln for ln in p.read_text().splitlines()
             if ln and not ln.startswith("#")]
    if not lines:
        raise FigureError(f"empty CSV: {path}")
    header = lines[0].split(",")
    if header != list(columns):
        raise FigureError(
            f"{path}: columns {header} do not match expected {list(columns)}")
    rows = [ln.split(",") for ln in lines[1:]]
    if not rows:
        raise FigureError(f"{path}: no data rows")
    table = {}
    for k, name in enumerate(header):
        col = [row[k] for row in rows]
        try:
            table[name] = np.array([float(x) for x in col])
        except ValueError:
            table[name] = np.array(col)  # non-numeric column (e.g. a side tag)
    return table


def _paths(spec: FigureSpec, key: str) -> list:
    try:
        value = spec.inputs[key]
    except KeyError:
        raise FigureError(f"{spec.figure_id} needs input {key!r}") from None
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _label(spec: FigureSpec, k: int, fallback: str) -> str:
    return spec.labels[k] if k < len(spec.labels) else fallback


def _fig1(spec: FigureSpec):
    tables = [read_csv(p, ["omega", "S11", "S22", "ReS12", "ImS12"])
              for p in _paths(spec, "spectra")]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), sharex=True)
    for k, t in enumerate(tables):
        lab = _label(spec, k, f"set {k}")
        axes[0].plot(t["omega"], t["S11"], label=lab)
        axes[1].plot(t["omega"], t["S22"], label=lab)
    for ax, name in zip(axes, ("oscillator 1", "oscillator 2")):
        ax.set_xlabel("frequency")
        ax.set_title(name)
        ax.legend(fontsize=8)
    axes[0].set_ylabel("spectrum")
    return fig


def _fig2(spec: FigureSpec):
    t = read_csv(_paths(spec, "ratios")[0],
                 ["temp_ratio", "omega1_split", "omega2_split"])
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(t["temp_ratio"], t["omega1_split"], "-", label="oscillator 1")
    ax.plot(t["temp_ratio"], t["omega2_split"], "--", label="oscillator 2")
    ax.set_xlabel("temperature ratio T2/T1")
    ax.set_ylabel("splitting coupling")
    ax.legend()
    return fig


def _fig3(spec: FigureSpec):
    sim = read_csv(_paths(spec, "simulated")[0], ["omega", "J_mean", "J_stderr"])
    ana = read_csv(_paths(spec, "analytic")[0], ["omega", "J"])
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(sim["omega"], sim["J_mean"], "-", label="ensemble mean")
    ax.plot(ana["omega"], ana["J"], "--", label="closed form")
    ax.set_xlabel("frequency")
    ax.set_ylabel("flow spectrum")
    ax.legend()
    return fig


def _fig4(spec: FigureSpec):
    rea = read_csv(_paths(spec, "realization")[0], ["omega", "J"])
    pot = read_csv(_paths(spec, "potential")[0], ["omega", "Phi"])
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(rea["omega"], rea["J"], "-", lw=0.8, label="single realization")
    ax.set_xlabel("frequency")
    ax.set_ylabel("flow spectrum")
    twin = ax.twinx()
    twin.plot(pot["omega"], pot["Phi"], "--", color="tab:red",
              label="potential")
    twin.set_ylabel("potential")
    handles = (ax.get_legend_handles_labels()[0]
               + twin.get_legend_handles_labels()[0])
    ax.legend(handles=handles, fontsize=8)
    return fig


def _fig5(spec: FigureSpec):
    sweep_cols = ["omega_coupling", "mean_omega_max", "disp_omega_max",
                  "disp_stderr", "n"]
    sweeps = [read_csv(p, sweep_cols) for p in _paths(spec, "sweeps")]
    fit_paths = (_paths(spec, "fits") if "fits" in spec.inputs else [])
    fits = [read_csv(p, ["alpha", "alpha_stderr", "r2", "window_lo",
                         "window_hi", "side"]) for p in fit_paths]
    ncols = 2 if fits else 1
    fig, axes = plt.subplots(1, ncols, figsize=(4.8 * ncols, 3.6))
    ax0 = axes[0] if ncols == 2 else axes
    for k, t in enumerate(sweeps):
        ax0.errorbar(t["omega_coupling"], t["disp_omega_max"],
                     yerr=t["disp_stderr"], fmt="o-", ms=3,
                     label=_label(spec, k, f"sweep {k}"))
    ax0.set_xlabel("coupling")
    ax0.set_ylabel("order-parameter dispersion")
    ax0.legend(fontsize=8)
    if fits:
        ax1 = axes[1]
        xs = np.arange(len(fits))
        ax1.errorbar(xs, [f["alpha"][0] for f in fits],
                     yerr=[f["alpha_stderr"][0] for f in fits], fmt="s")
        ax1.set_xticks(xs)
        ax1.set_xticklabels([_label(spec, k, str(k)) for k in xs], fontsize=8)
        ax1.set_xlabel("temperature ratio")
        ax1.set_ylabel("fitted exponent")
    return fig


FIGURES = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4,
           "fig5": _fig5}


def render(spec: FigureSpec) -> Path:
    """Validate inputs, draw the figure, write the PNG; returns the path.

    Raises :class:`FigureError` before creating any file if an input is
    missing or malformed.  Rendering the same spec twice produces
    byte-identical output.
    """
    if spec.figure_id not in FIGURES:
        raise FigureError(f"unknown figure id {spec.figure_id!r}; "
                          f"known: {sorted(FIGURES)}")
    fig = FIGURES[spec.figure_id](spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, **_SAVEFIG)
    finally:
        plt.close(fig)
    return out
