"""Closed-form fluctuation spectra and where they split.

The two diagonal spectrum elements each develop a double-peak structure at
their own coupling threshold, and neither threshold coincides with the
eigenvalue-coalescence point; both depend on the reservoir temperature
ratio.  The energy-flow spectrum splits at the temperature-independent
critical coupling instead.
"""
import numpy as np

from oscflux import (
    OscillatorPairParams,
    coupling_landmarks,
    energy_flow_spectrum,
    omega_max_analytic,
    spectrum_closed_form,
    splitting_coupling,
)

base = OscillatorPairParams(1e-3, 2e-3, 1e-3, 1.0, 1.0)
marks = coupling_landmarks(base)
ep, cr = marks.omega_ep, marks.omega_cr

print("splitting couplings at equal temperatures (ratios to coalescence):")
for osc in (1, 2):
    a = splitting_coupling(base, osc, criterion="curvature")
    b = splitting_coupling(base, osc, criterion="peak_count")
    print(f"  oscillator {osc}: curvature {a / ep:.4f}, dense-grid count {b / ep:.4f}")

print()
print("temperature-ratio dependence of the oscillator-1 splitting:")
for ratio in (0.0, 0.25, 1.0, 4.0):
    p = OscillatorPairParams(1e-3, 2e-3, 1e-3, 1.0, ratio)
    s = splitting_coupling(p, 1)
    print(f"  T2/T1 = {ratio:4.2f}: splitting at {s / ep:.4f} x coalescence")

print()
print("flow spectrum peak positions (temperature-independent):")
for factor in (0.67, 1.0, 1.5, 3.0):
    p = OscillatorPairParams(1e-3, 2e-3, factor * cr, 0.0, 1.0)
    peaks = omega_max_analytic(p)
    print(f"  coupling {factor:4.2f} x critical: peaks at "
          + ", ".join(f"{w / cr:+.4f}" for w in peaks) + "  (x critical)")

# spot-check one spectrum value against the matrix form
w = np.linspace(-5 * cr, 5 * cr, 7)
s = spectrum_closed_form(base, w)
j = energy_flow_spectrum(OscillatorPairParams(1e-3, 2e-3, 1e-3, 0.0, 1.0), w)
print()
print("sample frequencies (x critical):", np.round(w / cr, 2))
print("S11:", np.array2string(s[:, 0, 0].real, precision=3))
print("flow (hot reservoir 2):", np.array2string(j, precision=3))
