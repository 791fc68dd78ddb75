"""
Experiments on the spin-boson bath and the probe qubit coupled to it.
"""
import math
from typing import Any, Dict

import numpy as np

from ..core.errors import EstimationError
from ..core.experiment import BaseExperiment, ExperimentInput, ExperimentResult
from ..quantum.spin_boson import (
    SpinBosonParams,
    analytic_coherence,
    correlation_closed_form,
    dominant_peak_height,
    gamma_d,
    simulate_probe_coherence,
    spectral_function,
    two_time_correlation,
    validity,
)

REGRESSION_SPAN = 20.0
REGRESSION_POINTS = 2001


class SpinBosonCoherence(BaseExperiment):
    """Purity coherence of the probe for each T~ and coupling."""

    name = "spinboson-coherence"
    description = "Probe decoherence in the rotating-frame spin-boson model"
    columns = ("t_tilde", "t", "coherence", "m_sigma1", "epsilon")

    async def _execute(self, input_data: ExperimentInput) -> ExperimentResult:
        config = input_data.config
        grid = [(t_tilde, epsilon) for t_tilde in config.t_tildes for epsilon in config.epsilons]

        def run_point(item):
            t_tilde, epsilon = item
            params = SpinBosonParams(delta=config.delta, gamma_b=config.gamma_b,
                                     t_tilde=t_tilde, epsilon=epsilon)
            return simulate_probe_coherence(params, t_max=config.quantum_t_max,
                                            dt=config.quantum_dt, n_records=config.n_records)

        results = await self._run_points(run_point, grid, input_data.n_workers)

        rows = []
        points = []
        for (t_tilde, epsilon), probe in zip(grid, results):
            n = probe.times.size
            rows.extend(zip([t_tilde] * n, probe.times, probe.coherence,
                            probe.m_sigma1, [epsilon] * n))
            points.append(self._summarize(probe))
        return ExperimentResult(rows=rows, summary={"points": points})

    def _summarize(self, probe) -> Dict[str, Any]:
        params = probe.params
        rate = gamma_d(params)
        analytic = analytic_coherence(params, None, probe.times)
        entry: Dict[str, Any] = {
            "t_tilde": params.t_tilde,
            "epsilon": params.epsilon,
            "gamma_d": rate,
            "expected_relaxation_rate": 2.0 * rate,
            "tau_c": params.tau_c,
            "equilibrium_coherence": params.tanh_factor,
            "final_coherence": float(probe.coherence[-1]),
            "max_analytic_deviation": float(np.max(np.abs(probe.coherence - analytic))),
            "validity": validity(params, warn=False).as_dict(),
        }
        try:
            fit = probe.fit_relaxation_rate()
            entry["relaxation_rate"] = fit.rate
            entry["relaxation_rate_ratio"] = fit.rate / (2.0 * rate) if rate else None
        except EstimationError as e:
            self.logger.warning(f"T~={params.t_tilde}: relaxation rate not fitted: {e}")
            entry["relaxation_rate"] = None
            entry["relaxation_rate_ratio"] = None
        self.logger.info(f"T~={params.t_tilde}, eps={params.epsilon}: Gamma_d={rate:.4g}, "
                         f"fitted relaxation={entry['relaxation_rate']}")
        return entry


class SpinBosonSpectrum(BaseExperiment):
    """Closed-form bath spectrum with a regression-theorem cross-check."""

    name = "spinboson-spectrum"
    description = "Spectral function of the spin-boson bath"
    columns = ("t_tilde", "omega", "intensity")

    async def _execute(self, input_data: ExperimentInput) -> ExperimentResult:
        config = input_data.config
        delta = config.delta
        omega = config.omega_grid(-2.0 * delta, 2.0 * delta, delta / 500.0)

        def run_point(t_tilde: float):
            params = SpinBosonParams(delta=delta, gamma_b=config.gamma_b, t_tilde=t_tilde)
            return params, spectral_function(params, omega), self._regression_check(params, config.quantum_dt)

        results = await self._run_points(run_point, config.t_tildes, input_data.n_workers)

        rows = []
        points = []
        for params, intensity, deviation in results:
            rows.extend(zip([params.t_tilde] * omega.size, omega, intensity))
            points.append({
                "t_tilde": params.t_tilde,
                "tau_c": params.tau_c,
                "n_bar": params.n_bar,
                "n_up": params.n_up,
                "n_down": params.n_down,
                "peak_area_plus": 2.0 * math.pi * params.n_up,
                "peak_area_minus": 2.0 * math.pi * params.n_down,
                "dominant_peak_height": dominant_peak_height(params),
                "regression_max_deviation": deviation,
                "validity": validity(params, warn=False).as_dict(),
            })
        return ExperimentResult(rows=rows, summary={"points": points})

    @staticmethod
    def _regression_check(params: SpinBosonParams, dt) -> float:
        """Max |numerical - closed form| of <sigma^3(0) sigma^3(t)> over 20 tau_c."""
        t_grid = np.linspace(0.0, REGRESSION_SPAN * params.tau_c, REGRESSION_POINTS)
        numerical = two_time_correlation(params, t_grid, dt=dt)
        return float(np.max(np.abs(numerical - correlation_closed_form(params, t_grid))))
