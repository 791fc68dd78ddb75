"""Desk-scale reproductions of the headline results.

These runs take minutes; they are deselected by default and run with
``pytest -m slow``.
"""
import math
import os

import numpy as np
import pytest

from anomalous_decoherence.classical.dephasing import coherence_series
from anomalous_decoherence.classical.langevin import (
    ClassicalBathParams,
    derive_seed,
    hopping_rate,
    kramers_escape_rate,
    kramers_rate,
    simulate_ensemble,
)
from anomalous_decoherence.classical.spectral import default_omega_grid, spectral_peaks
from anomalous_decoherence.core.config import ExperimentConfig
from anomalous_decoherence.experiments.classical import COHERENCE_STREAM, REFERENCE_STREAM, spectrum_point
from anomalous_decoherence.quantum.operators import check_density_matrix
from anomalous_decoherence.quantum.spin_boson import SpinBosonParams, gamma_d, simulate_probe_coherence

pytestmark = pytest.mark.slow

WORKERS = os.cpu_count() or 1


def config_for(experiment, **overrides):
    return ExperimentConfig(experiment=experiment, **overrides)


class TestClassicalBath:
    """Spectrum, correlation time and rate law of the double-well bath."""

    def test_spectrum_shape(self):
        """Central peak at T = 0.25; side peaks near +-pi R at T = 1 and 2."""
        config = config_for("classical-spectrum")
        omega = default_omega_grid()

        cold = spectrum_point(config, 0, 0.25, omega, WORKERS).estimate
        assert abs(omega[np.argmax(cold.intensity)]) <= 0.05

        for index, temperature in ((1, 1.0), (2, 2.0)):
            estimate = spectrum_point(config, index, temperature, omega, WORKERS).estimate
            target = math.pi * kramers_rate(ClassicalBathParams(gamma1=0.4, temperature=temperature))
            peaks = spectral_peaks(estimate)
            assert np.any(np.abs(peaks - target) <= 0.15)
            assert np.any(np.abs(peaks + target) <= 0.15)

    def test_zero_frequency_monotonic(self):
        """I(0, T) and K(0, T) fall across T in {0.25, 0.5, 1, 2} beyond their errors."""
        config = config_for("izero-scan")
        zero = np.zeros(1)
        estimates = [spectrum_point(config, i, t, zero, WORKERS).estimate
                     for i, t in enumerate(config.temperatures)]
        for a, b in zip(estimates, estimates[1:]):
            assert a.i_zero - b.i_zero > math.hypot(a.i_zero_stderr, b.i_zero_stderr)
            assert a.k_zero - b.k_zero > math.hypot(a.k_zero_stderr, b.k_zero_stderr)

    def test_correlation_time(self):
        """The 1/e crossing of C_x: about 4.8 at T = 0.25 and 1.25 at T = 1.5."""
        config = config_for("izero-scan")
        times = []
        for index, (temperature, expected) in enumerate(((0.25, 4.8), (1.5, 1.25))):
            estimate = spectrum_point(config, index, temperature, np.zeros(1), WORKERS).estimate
            assert estimate.correlation_time_resolved
            assert estimate.correlation_time == pytest.approx(expected, rel=0.15)
            times.append(estimate.correlation_time)
        assert times[0] > 3 * times[1]

    @pytest.mark.parametrize("epsilon,t_max,n", [(0.05, 200.0, 5000), (0.02, 1200.0, 1000)])
    def test_rate_law(self, epsilon, t_max, n):
        """Fitted D(T) equals 2 eps^2 I(0, T) within [0.8, 1.25] and falls with T."""
        reference_config = config_for("izero-scan")
        rates = []
        for index, temperature in enumerate((0.5, 1.0, 2.0)):
            reference = spectrum_point(reference_config, index, temperature, np.zeros(1), WORKERS,
                                       stream=REFERENCE_STREAM).estimate
            params = ClassicalBathParams(gamma1=0.4, temperature=temperature, epsilon=epsilon)
            ensemble = simulate_ensemble(params, n, dt=0.01, t_max=t_max,
                                         master_seed=derive_seed(reference_config.master_seed,
                                                                 COHERENCE_STREAM, index, 0),
                                         n_workers=WORKERS)
            fit = coherence_series(ensemble).fit
            assert fit is not None
            assert 0.8 <= fit.rate / (2.0 * epsilon**2 * reference.i_zero) <= 1.25
            rates.append(fit.rate)
        assert rates[0] > rates[1] > rates[2]

    def test_rate_scales_with_coupling_squared(self):
        """Doubling eps multiplies D by 4 within 15%."""
        rates = []
        for epsilon in (0.025, 0.05):
            params = ClassicalBathParams(gamma1=0.4, temperature=1.0, epsilon=epsilon)
            ensemble = simulate_ensemble(params, 2000, dt=0.01, t_max=400.0, master_seed=23,
                                         record_every=50, n_workers=WORKERS)
            fit = coherence_series(ensemble).fit
            assert fit is not None
            rates.append(fit.rate)
        assert rates[1] / rates[0] == pytest.approx(4.0, rel=0.15)

    @pytest.fixture(scope="class")
    def hopping(self):
        """Measured hopping rates at T = 0.2 ... 0.5."""
        rates = {}
        for index, temperature in enumerate((0.2, 0.25, 0.3, 0.4, 0.5)):
            params = ClassicalBathParams(gamma1=0.4, temperature=temperature)
            ensemble = simulate_ensemble(params, 2000, dt=0.01, t_max=500.0, master_seed=17 + index,
                                         record_every=5, record_phase=False, n_workers=WORKERS)
            rates[temperature] = hopping_rate(ensemble)
        return rates

    def test_hopping_rate_increases_with_temperature(self, hopping):
        values = [hopping[t] for t in sorted(hopping)]
        for low, high in zip(values, values[1:]):
            assert high.rate - low.rate > 4 * math.hypot(low.stderr, high.stderr)

    def test_hopping_rate_matches_kramers_escape(self, hopping):
        """Within 25% of the moderate-damping Kramers rate across T in [0.2, 0.5]."""
        for temperature, measured in hopping.items():
            params = ClassicalBathParams(gamma1=0.4, temperature=temperature)
            assert measured.rate == pytest.approx(kramers_escape_rate(params), rel=0.25)

    def test_hopping_rate_at_quarter_temperature(self, hopping):
        """About 0.060 at T = 0.25; the closed form with gamma1 in the exponent gives 0.0462."""
        assert hopping[0.25].rate == pytest.approx(0.060, rel=0.15)
        assert kramers_rate(ClassicalBathParams(gamma1=0.4, temperature=0.25)) == pytest.approx(0.0462, rel=1e-3)


class TestSpinBosonProbe:
    """Anomalous temperature dependence of the quantum probe."""

    @pytest.fixture(scope="class")
    def results(self):
        out = {}
        for t_tilde in (0.5, 2.0, 80.0):
            params = SpinBosonParams(delta=20.0, gamma_b=1.0, t_tilde=t_tilde, epsilon=0.05)
            out[t_tilde] = simulate_probe_coherence(params, t_max=6.0 / gamma_d(params),
                                                    n_records=2000, keep_trajectory=True)
        return out

    def test_relaxation_rate(self, results):
        rates = []
        for t_tilde, probe in results.items():
            fit = probe.fit_relaxation_rate()
            assert fit.rate == pytest.approx(2.0 * gamma_d(probe.params), rel=0.05)
            rates.append(fit.rate)
        assert rates[0] > rates[1] > rates[2]

    def test_high_temperature_rate(self):
        params = SpinBosonParams(delta=20.0, gamma_b=1.0, t_tilde=80.0, epsilon=0.05)
        assert gamma_d(params) == pytest.approx(1.5625e-5, rel=1e-4)

    def test_equilibrium_coherence(self, results):
        for t_tilde, probe in results.items():
            assert probe.coherence[-1] == pytest.approx(math.tanh(0.5 / t_tilde), abs=1e-3)

    def test_states_stay_physical(self, results):
        for probe in results.values():
            for state in probe.trajectory.states:
                check = check_density_matrix(state)
                assert check.trace_error <= 1e-9
                assert check.hermiticity <= 1e-10
                assert check.min_eigenvalue >= -1e-8
