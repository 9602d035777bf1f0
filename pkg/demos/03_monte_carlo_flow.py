"""Monte Carlo flow spectra against the closed form.

Simulates a modest ensemble at three couplings spanning the transition
(single peak, flat top, split peaks) and compares the averaged flow
spectrum with the closed form bin by bin.  Takes about a minute.
"""
import time

import numpy as np

from oscflux import (
    OscillatorPairParams,
    coupling_landmarks,
    default_sim_config,
    energy_flow_spectrum,
    flow_ensemble,
)
from oscflux.spectral import SpectralOptions

N_REALIZATIONS = 500
base = OscillatorPairParams(1e-3, 2e-3, 1e-3, 0.0, 1.0)  # cold 1, hot 2
cr = coupling_landmarks(base).omega_cr

for factor in (0.67, 1.0, 3.0):
    p = OscillatorPairParams(1e-3, 2e-3, factor * cr, 0.0, 1.0)
    cfg = default_sim_config(p, base_seed=2024, n_realizations=N_REALIZATIONS)
    t0 = time.time()
    res = flow_ensemble(p, cfg, SpectralOptions(half_width=5 * cr), workers=2)
    target = energy_flow_spectrum(p, res.freqs)
    rms = np.sqrt(np.mean((res.flow_mean / target - 1.0) ** 2))
    k = np.argmax(res.flow_mean)
    print(f"coupling {factor:4.2f} x critical: "
          f"mean-flow peak at {res.freqs[k] / cr:+.3f} x critical, "
          f"RMS deviation from closed form {100 * rms:.1f}% "
          f"(n={N_REALIZATIONS}, {time.time() - t0:.0f}s)")

print()
print("The per-bin statistical error is ~1/sqrt(n), so the deviation above")
print("shrinks with the ensemble size; the flow is positive at every")
print("frequency because reservoir 2 is the hot one.")
