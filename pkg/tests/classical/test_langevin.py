"""Tests for the Langevin dynamics module."""
import math

import numpy as np
import pytest
from scipy import integrate, linalg

from anomalous_decoherence.classical.langevin import (
    ClassicalBathParams,
    PhysicalParams,
    TrajectoryState,
    boltzmann_moment,
    derive_seed,
    evolve,
    force,
    hopping_rate,
    kramers_escape_rate,
    kramers_rate,
    linear_bath_spectrum,
    potential_energy,
    rescale,
    sample_equilibrium,
    simulate_ensemble,
    step,
)
from anomalous_decoherence.core.errors import CapacityError, InvalidParameterError


def weak_error(params, dt, t_end=2.0, x0=1.0):
    """|<x^2(t_end)>| error of the Heun map against the exact linear-bath moments.

    The step is linear for the harmonic force, so its mean and covariance are
    propagated exactly instead of sampled.
    """
    columns = [step(TrajectoryState(x=1.0, v=0.0), params, dt, 0.0),
               step(TrajectoryState(x=0.0, v=1.0), params, dt, 0.0)]
    transfer = np.array([[s.x for s in columns], [s.v for s in columns]])
    kicked = step(TrajectoryState(x=0.0, v=0.0), params, dt, 1.0)
    kick = np.array([kicked.x, kicked.v])
    mean = np.array([x0, 0.0])
    cov = np.zeros((2, 2))
    for _ in range(int(round(t_end / dt))):
        mean = transfer @ mean
        cov = transfer @ cov @ transfer.T + np.outer(kick, kick)

    drift = np.array([[0.0, 1.0], [-1.0, -params.gamma1]])
    diffusion = np.diag([0.0, 2.0 * params.gamma1 * params.temperature])
    exact_mean = linalg.expm(drift * t_end) @ np.array([x0, 0.0])
    van_loan = linalg.expm(np.block([[-drift, diffusion], [np.zeros((2, 2)), drift.T]]) * t_end)
    exact_cov = van_loan[2:, 2:].T @ van_loan[:2, 2:]
    return abs(mean[0] ** 2 + cov[0, 0] - exact_mean[0] ** 2 - exact_cov[0, 0])


class TestParams:
    """Test cases for parameter validation and rescaling."""

    def test_negative_temperature(self):
        with pytest.raises(InvalidParameterError):
            ClassicalBathParams(gamma1=0.4, temperature=-1.0)

    def test_negative_gamma(self):
        with pytest.raises(InvalidParameterError):
            ClassicalBathParams(gamma1=-0.1, temperature=1.0)

    def test_unknown_potential(self):
        with pytest.raises(InvalidParameterError):
            ClassicalBathParams(gamma1=0.4, temperature=1.0, potential="quartic")

    def test_zero_temperature_has_no_noise(self):
        """sqrt(2 gamma1 T) vanishes exactly at T = 0."""
        assert ClassicalBathParams(gamma1=0.4, temperature=0.0).noise_amplitude == 0.0

    def test_non_positive_mass(self):
        with pytest.raises(InvalidParameterError):
            PhysicalParams(mass=0.0, a=1.0, b=1.0, gamma_bar=0.1, temperature=1.0)

    def test_rescale(self):
        """gamma1 = gamma_bar (m/a)^(1/2), T = b k_b T_phys / a^2."""
        physical = PhysicalParams(mass=4.0, a=1.0, b=2.0, gamma_bar=0.5, temperature=3.0)
        params = rescale(physical)
        assert params.gamma1 == pytest.approx(1.0)
        assert params.temperature == pytest.approx(6.0)
        assert physical.diffusion == pytest.approx(0.5 * 4.0 * 3.0)
        assert physical.length_unit == pytest.approx(math.sqrt(0.5))
        assert physical.time_unit == pytest.approx(2.0)


class TestPotential:
    """Test cases for the bath potentials."""

    def test_double_well_minima(self):
        """V(+-1) = -1/4 with zero force."""
        for x in (-1.0, 1.0):
            assert potential_energy(x) == pytest.approx(-0.25)
            assert force(x) == 0.0

    def test_barrier(self):
        assert potential_energy(0.0) == 0.0

    def test_harmonic(self):
        assert potential_energy(2.0, "harmonic") == pytest.approx(2.0)
        assert force(2.0, "harmonic") == -2.0


class TestStepper:
    """Test cases for the stochastic Heun step."""

    def test_rejects_bad_dt(self):
        params = ClassicalBathParams(gamma1=0.4, temperature=1.0)
        with pytest.raises(InvalidParameterError):
            step(TrajectoryState(x=0.0, v=0.0), params, 0.0, 0.0)

    def test_rng_required_when_noisy(self):
        params = ClassicalBathParams(gamma1=0.4, temperature=1.0)
        with pytest.raises(InvalidParameterError):
            evolve(TrajectoryState(x=0.0, v=0.0), params, 0.01, 10)

    def test_energy_conserved_without_bath(self):
        """gamma1 = 0, T = 0 is Hamiltonian; energy drift stays small."""
        params = ClassicalBathParams(gamma1=0.0, temperature=0.0)
        start = TrajectoryState(x=0.5, v=0.0)
        end = evolve(start, params, 0.01, 1000)
        energy = 0.5 * end.v**2 + potential_energy(end.x)
        assert energy == pytest.approx(potential_energy(0.5), abs=1e-3)
        assert end.t == pytest.approx(10.0)

    def test_second_order_convergence(self):
        """Halving dt cuts the deterministic error by about 4."""
        params = ClassicalBathParams(gamma1=0.4, temperature=0.0)
        start = TrajectoryState(x=0.5, v=0.3)
        reference = evolve(start, params, 0.000625, 1600)

        def error(dt):
            end = evolve(start, params, dt, int(round(1.0 / dt)))
            return math.hypot(end.x - reference.x, end.v - reference.v)

        assert error(0.02) / error(0.01) > 3.5

    def test_energy_drift_second_order(self):
        """Without a bath, halving dt cuts the largest energy drift by about 4 or more."""
        params = ClassicalBathParams(gamma1=0.0, temperature=0.0)
        start = TrajectoryState(x=0.5, v=0.0)
        initial = potential_energy(0.5)

        def drift(dt):
            state, worst = start, 0.0
            for _ in range(int(round(10.0 / dt))):
                state = step(state, params, dt, 0.0)
                worst = max(worst, abs(0.5 * state.v**2 + potential_energy(state.x) - initial))
            return worst

        assert drift(0.02) / drift(0.01) > 3.5

    def test_weak_first_order(self):
        """<x^2(t)> of the linear bath converges at least linearly in dt."""
        params = ClassicalBathParams(gamma1=0.4, temperature=1.0, potential="harmonic")
        assert weak_error(params, 0.1) / weak_error(params, 0.05) > 1.8
        assert weak_error(params, 0.05) / weak_error(params, 0.025) > 1.8

    def test_phase_is_trapezoid_of_x(self):
        """The stepper accumulates 2 eps times the trapezoid of x."""
        params = ClassicalBathParams(gamma1=0.4, temperature=1.0, epsilon=0.05)
        ensemble = simulate_ensemble(params, 20, dt=0.01, t_max=5.0, master_seed=3, record_every=1)
        integral = integrate.trapezoid(ensemble.x, dx=0.01, axis=1)
        np.testing.assert_allclose(ensemble.phase[:, -1], 2 * 0.05 * integral, rtol=1e-9, atol=1e-12)


class TestEquilibrium:
    """Test cases for Boltzmann sampling and its quadrature oracle."""

    def test_harmonic_moment(self):
        """<x^2> = T for the linear bath."""
        params = ClassicalBathParams(gamma1=0.4, temperature=0.7, potential="harmonic")
        assert boltzmann_moment(params, 2) == pytest.approx(0.7, rel=1e-8)

    def test_zero_temperature_moment(self):
        params = ClassicalBathParams(gamma1=0.4, temperature=0.0)
        assert boltzmann_moment(params, 2) == 1.0
        assert boltzmann_moment(params, 1) == 0.0

    def test_zero_temperature_sample(self):
        """At T = 0 the particle rests in a minimum."""
        params = ClassicalBathParams(gamma1=0.4, temperature=0.0)
        state = sample_equilibrium(params, 11)
        assert abs(state.x) == 1.0
        assert state.v == 0.0

    def test_sampled_moments(self):
        """Sampled <x^2> and <v^2> agree with the oracle within 4 standard errors."""
        params = ClassicalBathParams(gamma1=0.4, temperature=0.5)
        rng = np.random.default_rng(3)
        states = [sample_equilibrium(params, rng) for _ in range(4000)]
        x2 = np.array([s.x for s in states]) ** 2
        v2 = np.array([s.v for s in states]) ** 2

        assert abs(x2.mean() - boltzmann_moment(params, 2)) < 4 * x2.std() / math.sqrt(x2.size)
        assert abs(v2.mean() - 0.5) < 4 * v2.std() / math.sqrt(v2.size)

    def test_ensemble_stays_in_equilibrium(self):
        """<x^2> after evolution still matches the Boltzmann value."""
        params = ClassicalBathParams(gamma1=0.4, temperature=0.5)
        ensemble = simulate_ensemble(params, 1000, dt=0.01, t_max=10.0, master_seed=1,
                                     record_phase=False)
        x2 = ensemble.x[:, -1] ** 2
        tolerance = 4 * x2.std() / math.sqrt(x2.size) + 0.01
        assert abs(x2.mean() - boltzmann_moment(params, 2)) < tolerance

    def test_mean_stays_zero(self):
        """<x(t)> stays within 4 standard errors of 0 at every record."""
        params = ClassicalBathParams(gamma1=0.4, temperature=0.5)
        ensemble = simulate_ensemble(params, 2000, dt=0.01, t_max=20.0, master_seed=4,
                                     record_every=50, record_phase=False)
        stderr = ensemble.x.std(axis=0, ddof=1) / math.sqrt(ensemble.n_realizations)
        assert np.all(np.abs(ensemble.x.mean(axis=0)) < 4 * stderr)

    @pytest.mark.parametrize("temperature", [0.01, 0.02, 0.05])
    def test_second_moment_near_one_when_cold(self, temperature):
        """<x^2> ~ 1 - T deep in the wells."""
        params = ClassicalBathParams(gamma1=0.4, temperature=temperature)
        moment = boltzmann_moment(params, 2)
        assert moment == pytest.approx(1.0, rel=0.1)
        assert moment < 1.0

    def test_second_moment_falls_below_one_as_barrier_is_crossed(self):
        """At T = 0.25 the barrier region is populated and <x^2> is well below 1."""
        moments = [boltzmann_moment(ClassicalBathParams(gamma1=0.4, temperature=t), 2)
                   for t in (0.05, 0.1, 0.25)]
        assert moments[0] > moments[1] > moments[2]
        assert moments[2] < 0.9

    def test_cold_ensemble_second_moment(self):
        params = ClassicalBathParams(gamma1=0.4, temperature=0.05)
        ensemble = simulate_ensemble(params, 1000, dt=0.01, t_max=10.0, master_seed=2,
                                     record_phase=False)
        assert np.mean(ensemble.x[:, -1] ** 2) == pytest.approx(1.0, rel=0.1)


class TestEnsemble:
    """Test cases for ensemble simulation."""

    @pytest.fixture
    def params(self):
        return ClassicalBathParams(gamma1=0.4, temperature=1.0, epsilon=0.05)

    def test_shape_and_grid(self, params):
        ensemble = simulate_ensemble(params, 8, dt=0.01, t_max=2.0, master_seed=0, record_every=10)
        assert ensemble.x.shape == (8, 21)
        assert ensemble.phase.shape == (8, 21)
        assert ensemble.times[-1] == pytest.approx(2.0)
        assert ensemble.equilibrium_start is True

    def test_thread_count_does_not_change_result(self, params):
        """Output is identical for one or several worker threads."""
        one = simulate_ensemble(params, 10, dt=0.01, t_max=1.0, master_seed=5, block_size=4)
        many = simulate_ensemble(params, 10, dt=0.01, t_max=1.0, master_seed=5, block_size=4,
                                 n_workers=3)
        np.testing.assert_array_equal(one.x, many.x)
        np.testing.assert_array_equal(one.phase, many.phase)

    def test_realizations_independent_of_n(self, params):
        """Realization i depends only on (seed, i)."""
        small = simulate_ensemble(params, 4, dt=0.01, t_max=1.0, master_seed=5)
        large = simulate_ensemble(params, 10, dt=0.01, t_max=1.0, master_seed=5)
        np.testing.assert_array_equal(small.x, large.x[:4])

    def test_seed_changes_result(self, params):
        a = simulate_ensemble(params, 4, dt=0.01, t_max=1.0, master_seed=5)
        b = simulate_ensemble(params, 4, dt=0.01, t_max=1.0, master_seed=6)
        assert not np.array_equal(a.x, b.x)

    def test_capacity_checked_before_allocation(self, params):
        with pytest.raises(CapacityError) as excinfo:
            simulate_ensemble(params, 1000, dt=0.01, t_max=200.0, max_bytes=1000)
        assert excinfo.value.requested_bytes == 1000 * 2001 * 8 * 2
        assert "reduce n" in str(excinfo.value)

    def test_resting_particle(self):
        """T = 0 from rest at a minimum stays there; the phase grows as 2 eps t."""
        params = ClassicalBathParams(gamma1=0.4, temperature=0.0, epsilon=0.05)
        ensemble = simulate_ensemble(params, 3, dt=0.01, t_max=1.0,
                                     initial_state=TrajectoryState(x=1.0, v=0.0))
        assert np.all(ensemble.x == 1.0)
        np.testing.assert_allclose(ensemble.phase[:, -1], 0.1, rtol=1e-12)
        assert ensemble.equilibrium_start is False

    def test_invalid_arguments(self, params):
        with pytest.raises(InvalidParameterError):
            simulate_ensemble(params, 0)
        with pytest.raises(InvalidParameterError):
            simulate_ensemble(params, 2, dt=-0.01)

    @pytest.mark.parametrize("t_max", [0.05, 0.19, 1.015])
    def test_horizon_must_be_whole_records(self, params, t_max):
        """A t_max that is not a whole number of record strides is rejected, never truncated."""
        with pytest.raises(InvalidParameterError, match="whole number"):
            simulate_ensemble(params, 2, dt=0.01, t_max=t_max, record_every=10)

    def test_horizon_recorded(self, params):
        ensemble = simulate_ensemble(params, 2, dt=0.01, t_max=0.2, record_every=10)
        assert ensemble.times[-1] == pytest.approx(0.2)
        assert ensemble.t_max == pytest.approx(0.2)

    def test_derive_seed(self):
        """Derived seeds are reproducible and distinct."""
        assert derive_seed(42, 0, 1) == derive_seed(42, 0, 1)
        assert derive_seed(42, 0, 1) != derive_seed(42, 0, 2)


class TestRates:
    """Test cases for the Kramers rate and hopping counts."""

    def test_kramers_value(self):
        """pi R = 0.946 at gamma1 = 0.4, T = 1."""
        params = ClassicalBathParams(gamma1=0.4, temperature=1.0)
        assert math.pi * kramers_rate(params) == pytest.approx(0.946, abs=1e-3)

    def test_kramers_limits(self):
        assert kramers_rate(ClassicalBathParams(gamma1=0.4, temperature=0.0)) == 0.0
        with pytest.raises(InvalidParameterError):
            kramers_rate(ClassicalBathParams(gamma1=0.4, temperature=1.0, potential="harmonic"))
        with pytest.raises(InvalidParameterError):
            kramers_rate(ClassicalBathParams(gamma1=0.0, temperature=1.0))

    def test_kramers_increases_with_temperature(self):
        rates = [kramers_rate(ClassicalBathParams(gamma1=0.4, temperature=t)) for t in (0.25, 0.5, 1, 2)]
        assert all(a < b for a, b in zip(rates, rates[1:]))

    def test_linear_bath_grows_with_temperature(self):
        """The linear-bath spectrum is proportional to T at every frequency."""
        omega = np.linspace(-3, 3, 13)
        low = linear_bath_spectrum(ClassicalBathParams(0.4, 0.5, potential="harmonic"), omega)
        high = linear_bath_spectrum(ClassicalBathParams(0.4, 1.0, potential="harmonic"), omega)
        np.testing.assert_allclose(high, 2 * low)
        assert linear_bath_spectrum(ClassicalBathParams(0.4, 1.0), 0.0) == pytest.approx(0.8)

    def test_hopping_count(self, ensemble_factory):
        """Two crossings in four time units, none in the other realization."""
        ensemble = ensemble_factory([[1.0, 0.9, -1.0, 0.2, 1.0],
                                     [1.0, 1.0, 1.0, 1.0, 1.0]])
        hops = hopping_rate(ensemble)
        assert hops.n_transitions == 2
        assert hops.duration == 4.0
        assert hops.rate == pytest.approx(0.25)

    def test_hysteresis(self, ensemble_factory):
        """Excursions that stay inside the threshold band are not counted."""
        ensemble = ensemble_factory([[1.0, 0.1, -0.3, 0.2, 1.0]])
        assert hopping_rate(ensemble).n_transitions == 0

    def test_kramers_escape_rate(self):
        """Moderate-damping Kramers rate with barrier 1/4 and curvatures 2 and 1."""
        params = ClassicalBathParams(gamma1=0.4, temperature=0.25)
        prefactor = (math.sqrt(1.04) - 0.2) * math.sqrt(2.0) / (2.0 * math.pi)
        assert kramers_escape_rate(params) == pytest.approx(prefactor * math.exp(-1.0), rel=1e-12)
        assert kramers_escape_rate(params) == pytest.approx(0.06788, rel=1e-3)
        assert kramers_escape_rate(ClassicalBathParams(gamma1=0.4, temperature=0.0)) == 0.0
        with pytest.raises(InvalidParameterError):
            kramers_escape_rate(ClassicalBathParams(gamma1=0.4, temperature=1.0, potential="harmonic"))
