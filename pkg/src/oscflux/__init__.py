"""Coupled thermally driven oscillators: spectra, energy flow, criticality.

Library layout
--------------
``model``        parameters, validation and the drift/diffusion matrices
``analytic``     closed-form spectra, landmarks, flow and splitting couplings
``lyapunov``     stationary covariance, resolvent spectrum, correlators
``sde``          exact and Euler-Maruyama trajectory generation
``spectral``     periodograms, flow spectra and ensemble averaging
``criticality``  order-parameter extraction, dispersion sweeps, exponent fits
``verify``       cross-oracle self-check battery
``cli``          YAML-config batch front end (``oscflux`` console script)
"""

from .model import OscillatorPairParams, LinearSystem, validate, build_system
from .analytic import (
    ModalDecomposition,
    CouplingLandmarks,
    modal_decomposition,
    coupling_landmarks,
    phi_potential,
    spectrum_closed_form,
    energy_flow_spectrum,
    omega_max_analytic,
    splitting_coupling,
)
from .lyapunov import (
    UnstableSystemError,
    stationary_covariance,
    spectrum_resolvent,
    two_time_correlator,
)
from .sde import (
    SimConfig,
    Trajectory,
    default_sim_config,
    increment_covariance,
    simulate_trajectory,
    ensemble_run,
)
from .spectral import (
    SpectralGrid,
    SpectralOptions,
    periodogram_matrix,
    flow_spectrum_realization,
    average_spectra,
    ensemble_spectra,
)
from .criticality import (
    CriticalitySweep,
    PowerLawFit,
    extract_omega_max,
    flow_ensemble,
    dispersion_sweep,
    fit_critical_exponent,
    temperature_ratio_invariance,
)

__version__ = "0.1.0"
