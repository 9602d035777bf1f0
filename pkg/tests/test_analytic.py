import numpy as np
import pytest

from oscflux import (
    OscillatorPairParams,
    build_system,
    coupling_landmarks,
    energy_flow_spectrum,
    modal_decomposition,
    omega_max_analytic,
    phi_potential,
    spectrum_closed_form,
    spectrum_resolvent,
    splitting_coupling,
)
from oscflux.analytic import count_spectrum_maxima

from conftest import G1, G2, random_params

CR = float(np.sqrt(0.5 * (G1 ** 2 + G2 ** 2)))  # critical coupling, ref rates
EP = 0.5 * abs(G2 - G1)


def params_at(coupling, t1=1.0, t2=1.0):
    return OscillatorPairParams(G1, G2, coupling, t1, t2)


class TestModalDecomposition:
    def test_coalescence_at_ep(self):
        m = modal_decomposition(params_at(EP))
        assert m.coalescent and m.e2 is None
        assert m.lambda1 == pytest.approx(-1.5e-3, rel=1e-14)
        assert m.lambda2 == pytest.approx(-1.5e-3, rel=1e-14)

    def test_decoupled_limit(self):
        m = modal_decomposition(params_at(0.0))
        assert sorted([m.lambda1.real, m.lambda2.real]) == [-G2, -G1]
        assert {tuple(np.abs(m.e1)), tuple(np.abs(m.e2))} == {(1, 0), (0, 1)}

    def test_equal_rates_give_oscillatory_pair(self):
        m = modal_decomposition(OscillatorPairParams(1e-3, 1e-3, 7e-4, 1, 1))
        assert m.lambda1 == pytest.approx(-1e-3 + 7e-4j, rel=1e-14)
        assert m.lambda2 == pytest.approx(-1e-3 - 7e-4j, rel=1e-14)

    def test_trace_det_identities_and_eigen_residual(self):
        rng = np.random.default_rng(41)
        for _ in range(300):
            p = random_params(rng)
            m = modal_decomposition(p)
            tr = -(p.gamma1 + p.gamma2)
            det = p.gamma1 * p.gamma2 + p.coupling ** 2
            assert m.lambda1 + m.lambda2 == pytest.approx(tr, rel=1e-12)
            assert m.lambda1 * m.lambda2 == pytest.approx(det, rel=1e-12)
            drift = build_system(p).drift
            pairs = [(m.lambda1, m.e1)]
            if not m.coalescent:
                pairs.append((m.lambda2, m.e2))
            for lam, vec in pairs:
                resid = drift @ vec - lam * vec
                assert np.abs(resid).max() <= 1e-12 * (
                    np.abs(drift).max() * np.abs(vec).max())


class TestLandmarks:
    def test_reference_rates(self):
        lm = coupling_landmarks(params_at(1e-3))
        assert lm.omega_ep == 5e-4
        assert lm.omega_cr == pytest.approx(1.58114e-3, rel=1e-5)
        assert lm.omega_cr == np.sqrt((G1 ** 2 + G2 ** 2) / 2)

    def test_equal_rates_have_critical_point_without_coalescence(self):
        lm = coupling_landmarks(OscillatorPairParams(1e-3, 1e-3, 0.0, 1, 1))
        assert lm.omega_ep == 0.0
        assert lm.omega_cr == pytest.approx(1e-3, rel=1e-15)

    def test_ordering(self):
        rng = np.random.default_rng(43)
        for _ in range(200):
            lm = coupling_landmarks(random_params(rng))
            assert lm.omega_cr >= lm.omega_ep


class TestPhiPotential:
    def test_value_at_zero(self):
        p = params_at(1e-3)
        assert phi_potential(p, 0.0) == pytest.approx(
            (G1 * G2 + 1e-6) ** 2, rel=1e-14)

    def test_minimum_location_above_threshold(self):
        p = params_at(3 * CR)
        w = np.linspace(-10 * G2, 10 * G2, 1_000_001)
        brute = w[np.argmin(phi_potential(p, w))]
        assert abs(brute) == pytest.approx(np.sqrt(8) * CR, abs=w[1] - w[0])

    def test_flat_bottom_at_threshold(self):
        p = params_at(CR)
        w = np.array([0.0, 1e-4, 5e-4, 2e-3])
        want = (G1 * G2 + CR ** 2) ** 2 + w ** 4
        assert np.allclose(phi_potential(p, w), want, rtol=1e-12)

    def test_branches_agree_near_threshold(self):
        w = np.linspace(-5e-3, 5e-3, 101)
        lo = phi_potential(params_at(np.nextafter(CR, 0)), w)
        hi = phi_potential(params_at(np.nextafter(CR, 1)), w)
        assert np.allclose(lo, hi, rtol=1e-9)


class TestSpectrumClosedForm:
    def test_decoupled_lorentzian(self):
        p = params_at(0.0, t1=1.0, t2=0.5)
        w = np.linspace(-0.01, 0.01, 301)
        s = spectrum_closed_form(p, w)
        assert np.allclose(s[:, 0, 0].real,
                           G1 * 1.0 / (np.pi * (G1 ** 2 + w ** 2)), rtol=1e-12)
        assert np.all(s[:, 0, 1] == 0)

    def test_peak_value_at_critical_coupling(self):
        # frozen from the resolvent route, and re-checked against it here
        p = params_at(CR)
        s0 = spectrum_closed_form(p, 0.0)[0, 0].real
        assert s0 == pytest.approx(141.4710605261292, rel=1e-12)
        res = spectrum_resolvent(build_system(p), 0.0)[0, 0].real
        assert s0 == pytest.approx(res, rel=1e-10)

    def test_hermitian_psd_at_random_frequencies(self):
        rng = np.random.default_rng(47)
        p = random_params(rng)
        w = rng.uniform(-10 * p.gamma2, 10 * p.gamma2, 10)
        s = spectrum_closed_form(p, w)
        assert np.array_equal(s, np.conj(np.swapaxes(s, -1, -2)))
        assert np.linalg.eigvalsh(s).min() >= 0

    def test_matches_resolvent_on_random_inputs(self):
        rng = np.random.default_rng(53)
        for _ in range(100):
            p = random_params(rng)
            system = build_system(p)
            w = rng.uniform(-10, 10, 20) * max(p.gamma1, p.gamma2, p.coupling)
            a = spectrum_closed_form(p, w)
            b = spectrum_resolvent(system, w)
            scale = np.abs(b).max(axis=(-2, -1), keepdims=True)
            assert (np.abs(a - b) / scale).max() <= 1e-10

    def test_wiener_khinchin_integral(self, hot_cold_params):
        from oscflux import stationary_covariance
        from scipy.integrate import simpson
        p = hot_cold_params
        half = 100.0 * max(p.gamma1, p.gamma2, p.coupling)
        w = np.linspace(-half, half, 200_001)
        c = stationary_covariance(build_system(p))
        integral = simpson(spectrum_closed_form(p, w), x=w, axis=0)
        assert np.abs(np.diag(integral - c)).max() <= 0.01 * np.abs(np.diag(c)).max()


class TestEnergyFlowSpectrum:
    def test_equal_temperatures_no_flow(self):
        w = np.linspace(-0.01, 0.01, 101)
        assert np.all(energy_flow_spectrum(params_at(1e-3, 1.0, 1.0), w) == 0)

    def test_peak_value_at_critical_coupling(self):
        # frozen from the resolvent cross-check below
        p = params_at(CR, t1=0.0, t2=1.0)
        j0 = energy_flow_spectrum(p, 0.0)
        assert j0 == pytest.approx(49.707863806900775, rel=1e-12)
        res = spectrum_resolvent(build_system(p), 0.0)
        assert j0 == pytest.approx(res[0, 1].imag, rel=1e-10)

    def test_split_maxima_above_threshold(self):
        p = params_at(3 * CR, t1=0.0, t2=1.0)
        w = np.linspace(-10 * G2, 10 * G2, 400_001)
        j = energy_flow_spectrum(p, w)
        assert abs(w[np.argmax(j)]) == pytest.approx(2 * np.sqrt(2) * CR,
                                                     abs=2 * (w[1] - w[0]))

    def test_sign_constant_and_hot_to_cold(self):
        w = np.linspace(-0.02, 0.02, 1001)
        assert np.all(energy_flow_spectrum(params_at(1e-3, 0.0, 1.0), w) > 0)
        assert np.all(energy_flow_spectrum(params_at(1e-3, 1.0, 0.0), w) < 0)


class TestOmegaMaxAnalytic:
    @pytest.mark.parametrize("factor", [0.67, 1.0])
    def test_single_peak_at_or_below_threshold(self, factor):
        assert np.array_equal(omega_max_analytic(params_at(factor * CR)),
                              [0.0])

    def test_above_threshold(self):
        got = omega_max_analytic(params_at(3 * CR))
        want = 2 * np.sqrt(2) * CR
        assert got == pytest.approx([-want, want], rel=1e-12)
        assert want == pytest.approx(4.4721e-3, rel=1e-4)


class TestSplittingCoupling:
    def test_curvature_values_at_equal_temperatures(self):
        # the curvature criterion has closed quadratic roots for these
        # rates: sqrt(1.6)*1e-3 for oscillator 1, 5e-4 for oscillator 2
        p = params_at(1e-3)
        s1 = splitting_coupling(p, 1)
        s2 = splitting_coupling(p, 2)
        assert s1 == pytest.approx(np.sqrt(1.6) * 1e-3, rel=3e-6)
        assert s2 == pytest.approx(5e-4, rel=3e-6)
        assert s1 / EP == pytest.approx(2.5298221281, rel=3e-6)
        assert s2 / EP == pytest.approx(1.0, rel=3e-6)

    def test_criteria_agree(self):
        p = params_at(1e-3)
        for osc in (1, 2):
            a = splitting_coupling(p, osc, criterion="curvature")
            b = splitting_coupling(p, osc, criterion="peak_count")
            assert abs(a - b) / b <= 1e-4

    def test_peak_count_transitions(self):
        p = params_at(1e-3)
        assert count_spectrum_maxima(p, 1, 0.5 * np.sqrt(1.6) * 1e-3) == 1
        assert count_spectrum_maxima(p, 1, 2.0 * np.sqrt(1.6) * 1e-3) == 2

    def test_no_split_inside_narrow_bracket(self):
        p = params_at(1e-3)
        assert splitting_coupling(p, 1, bracket=(1e-6, 1e-4)) is None

    def test_zero_cold_temperature_split_at_critical_coupling(self):
        # with T1 = 0 the curvature root of oscillator 1 sits exactly at
        # the critical coupling
        p = params_at(1e-3, t1=0.0, t2=1.0)
        assert splitting_coupling(p, 1) == pytest.approx(CR, rel=3e-6)
