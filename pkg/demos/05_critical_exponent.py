"""Divergence of the order-parameter dispersion near the critical coupling.

Sweeps the coupling toward the critical point from below, fits the
dispersion to a power law in the distance from the transition, and repeats
at a second temperature ratio: the exponent depends on the ratio, not on
the absolute temperatures.  Desk scale: a few minutes.
"""
import time

import numpy as np

from oscflux import (
    OscillatorPairParams,
    coupling_landmarks,
    default_sim_config,
    dispersion_sweep,
    fit_critical_exponent,
)
from oscflux.sde import SimConfig

N = 800  # realizations per coupling; increase for tighter error bars
G1, G2 = 1e-3, 2e-3
cr = coupling_landmarks(OscillatorPairParams(G1, G2, 0.0, 1.0, 0.0)).omega_cr
offsets = np.geomspace(0.08, 0.65, 8) * cr
couplings = np.sort(cr - offsets)
base = default_sim_config(OscillatorPairParams(G1, G2, 0.0, 1.0, 0.0), 0, 1)
cfg = SimConfig(dt=0.02 / G2, t_burn=base.t_burn, t_f=base.t_f,
                base_seed=99, n_realizations=N)

for ratio in (0.0, 0.5):
    p = OscillatorPairParams(G1, G2, 0.0, 1.0, ratio)  # reservoir 1 is hot
    t0 = time.time()
    sweep = dispersion_sweep(p, couplings, cfg, flow_sign=-1.0, workers=2)
    fit = fit_critical_exponent(sweep, window=(0.08, 0.66), side="below")
    print(f"T2/T1 = {ratio}:")
    for om, d, se in zip(sweep.couplings, sweep.dispersion,
                         sweep.dispersion_stderr):
        bar = "#" * int(60 * d / sweep.dispersion.max())
        print(f"  offset {(om - cr) / cr:+.3f}: D = {d:.3e} +- {se:.0e} {bar}")
    print(f"  power-law exponent {fit.exponent:+.3f} +- {fit.exponent_stderr:.3f}"
          f"  (r^2 = {fit.r_squared:.3f}, {time.time() - t0:.0f}s)")
    print()

print("The dispersion grows toward the critical coupling with a ratio-")
print("dependent exponent; multiplying both temperatures by any factor")
print("with matched seeds reproduces the sweep bit for bit (the pipeline")
print("simulates the temperature-normalized system).")
