"""
Experiments on the classical double-well (or linear) bath.
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..classical.dephasing import (
    coherence_series,
    predicted_rate,
    rate_law_ratio,
    rate_law_validity,
    short_time_exponent,
)
from ..classical.langevin import (
    ClassicalBathParams,
    TrajectoryEnsemble,
    derive_seed,
    hopping_rate,
    kramers_escape_rate,
    kramers_rate,
    simulate_ensemble,
)
from ..classical.spectral import (
    DEFAULT_OMEGA_MAX,
    DEFAULT_OMEGA_MIN,
    DEFAULT_OMEGA_STEP,
    SpectrumEstimate,
    autocorrelation,
    spectral_peaks,
    spectrum,
)
from ..core.config import ExperimentConfig
from ..core.errors import EstimationError
from ..core.experiment import BaseExperiment, ExperimentInput, ExperimentResult

# spawn keys separating the independent random streams of each experiment
SPECTRUM_STREAM = 0
COHERENCE_STREAM = 1
REFERENCE_STREAM = 2


@dataclass
class SpectrumPoint:
    temperature: float
    estimate: SpectrumEstimate
    ensemble: TrajectoryEnsemble


def _bath_params(config: ExperimentConfig, temperature: float,
                 epsilon: float = 0.0) -> ClassicalBathParams:
    return ClassicalBathParams(gamma1=config.gamma1, temperature=temperature,
                               epsilon=epsilon, potential=config.potential)


def _ensemble(config: ExperimentConfig, params: ClassicalBathParams, seed: int,
              record_phase: bool, n_workers: int) -> TrajectoryEnsemble:
    return simulate_ensemble(
        params,
        config.n_realizations,
        dt=config.dt,
        t_max=config.t_max,
        master_seed=seed,
        record_every=config.record_every,
        record_phase=record_phase,
        n_workers=n_workers,
        max_bytes=config.max_ensemble_bytes,
    )


def spectrum_point(config: ExperimentConfig, index: int, temperature: float,
                   omega: np.ndarray, n_workers: int = 1,
                   stream: int = SPECTRUM_STREAM) -> SpectrumPoint:
    """Simulate one temperature and estimate its spectrum."""
    params = _bath_params(config, temperature)
    seed = derive_seed(config.master_seed, stream, index)
    ensemble = _ensemble(config, params, seed, record_phase=False, n_workers=n_workers)
    ac = autocorrelation(ensemble, time_average=config.time_average)
    return SpectrumPoint(temperature, spectrum(ac, omega), ensemble)


def _scalars(point: SpectrumPoint) -> Dict[str, Any]:
    estimate = point.estimate
    return {
        "i_zero": estimate.i_zero,
        "i_zero_stderr": estimate.i_zero_stderr,
        "k_zero": estimate.k_zero,
        "k_zero_stderr": estimate.k_zero_stderr,
        "t_c": estimate.correlation_time,
        "t_c_resolved": estimate.correlation_time_resolved,
        "tail_fraction": estimate.tail_fraction,
    }


def _strictly_decreasing(values: List[float], errors: List[float]) -> bool:
    """Each step down exceeds the combined standard error of its two ends."""
    return all(a - b > math.hypot(ea, eb)
               for a, b, ea, eb in zip(values, values[1:], errors, errors[1:]))


class ClassicalSpectrum(BaseExperiment):
    """I(omega, T) of the bath coordinate for each temperature."""

    name = "classical-spectrum"
    description = "Power spectrum of the classical bath coordinate"
    columns = ("temperature", "omega", "intensity", "stderr")

    async def _execute(self, input_data: ExperimentInput) -> ExperimentResult:
        config = input_data.config
        omega = config.omega_grid(DEFAULT_OMEGA_MIN, DEFAULT_OMEGA_MAX, DEFAULT_OMEGA_STEP)
        temperatures = config.temperatures
        inner = max(1, input_data.n_workers // len(temperatures))
        points = await self._run_points(
            lambda item: spectrum_point(config, item[0], item[1], omega, inner),
            list(enumerate(temperatures)),
            input_data.n_workers,
        )

        rows: List[Tuple[float, ...]] = []
        per_temperature: List[Dict[str, Any]] = []
        for point in points:
            estimate = point.estimate
            rows.extend(zip([point.temperature] * omega.size, estimate.omega,
                            estimate.intensity, estimate.stderr))
            entry = {"temperature": point.temperature, **_scalars(point)}
            peaks = spectral_peaks(estimate)
            entry["side_peaks"] = [float(w) for w in peaks if w > 0]
            if config.potential == "double_well":
                params = point.ensemble.params
                entry["pi_kramers_rate"] = math.pi * kramers_rate(params)
                entry["kramers_escape_rate"] = kramers_escape_rate(params)
                hops = hopping_rate(point.ensemble)
                entry["hopping_rate"] = hops.rate
                entry["hopping_rate_stderr"] = hops.stderr
            self.logger.info(f"T={point.temperature}: I(0)={estimate.i_zero:.4g}, "
                             f"t_c={estimate.correlation_time:.3g}")
            per_temperature.append(entry)

        return ExperimentResult(rows=rows, summary={"temperatures": per_temperature})


class IZeroScan(BaseExperiment):
    """I(0, T), K(0, T) = I(0, T)/T and t_c across temperatures."""

    name = "izero-scan"
    description = "Zero-frequency spectrum and correlation time versus temperature"
    columns = ("temperature", "i_zero", "k_zero", "t_c", "stderr")

    async def _execute(self, input_data: ExperimentInput) -> ExperimentResult:
        config = input_data.config
        zero = np.zeros(1)
        temperatures = config.temperatures
        inner = max(1, input_data.n_workers // len(temperatures))
        points = await self._run_points(
            lambda item: spectrum_point(config, item[0], item[1], zero, inner),
            list(enumerate(temperatures)),
            input_data.n_workers,
        )

        rows = []
        per_temperature = []
        for point in points:
            estimate = point.estimate
            rows.append((point.temperature, estimate.i_zero, estimate.k_zero,
                         estimate.correlation_time, estimate.i_zero_stderr))
            entry = {"temperature": point.temperature, **_scalars(point),
                     "linear_bath_i_zero": 2.0 * config.gamma1 * point.temperature}
            per_temperature.append(entry)
            self.logger.info(f"T={point.temperature}: I(0)={estimate.i_zero:.4g} "
                             f"+- {estimate.i_zero_stderr:.2g}, K(0)={estimate.k_zero:.4g}")

        ordered = sorted(points, key=lambda p: p.temperature)
        summary = {
            "temperatures": per_temperature,
            "i_zero_decreasing": _strictly_decreasing(
                [p.estimate.i_zero for p in ordered], [p.estimate.i_zero_stderr for p in ordered]),
            "k_zero_decreasing": _strictly_decreasing(
                [p.estimate.k_zero for p in ordered], [p.estimate.k_zero_stderr for p in ordered]),
        }
        return ExperimentResult(rows=rows, summary=summary)


class ClassicalCoherence(BaseExperiment):
    """Probe coherence C(t), fitted D(T) and the rate-law ratio."""

    name = "classical-coherence"
    description = "Dephasing of a probe coupled to the classical bath"
    columns = ("temperature", "t", "coherence", "stderr", "epsilon")

    async def _execute(self, input_data: ExperimentInput) -> ExperimentResult:
        config = input_data.config
        temperatures = config.temperatures
        grid = [(i, t, j, eps) for i, t in enumerate(temperatures)
                for j, eps in enumerate(config.epsilons)]
        inner = max(1, input_data.n_workers // len(grid))

        def coherence_point(item):
            i, temperature, j, epsilon = item
            params = _bath_params(config, temperature, epsilon)
            seed = derive_seed(config.master_seed, COHERENCE_STREAM, i, j)
            ensemble = _ensemble(config, params, seed, record_phase=True, n_workers=inner)
            return coherence_series(ensemble)

        zero = np.zeros(1)
        references = await self._run_points(
            lambda item: spectrum_point(config, item[0], item[1], zero, inner, REFERENCE_STREAM),
            list(enumerate(temperatures)),
            input_data.n_workers,
        )
        series_list = await self._run_points(coherence_point, grid, input_data.n_workers)

        rows = []
        points = []
        for (i, temperature, _, epsilon), series in zip(grid, series_list):
            reference = references[i].estimate
            rows.extend(zip([temperature] * series.times.size, series.times, series.values,
                            series.stderr, [epsilon] * series.times.size))
            points.append(self._summarize(temperature, epsilon, series, reference))

        return ExperimentResult(rows=rows, summary={"points": points})

    def _summarize(self, temperature: float, epsilon: float, series,
                   reference: SpectrumEstimate) -> Dict[str, Any]:
        fit = series.fit
        entry: Dict[str, Any] = {
            "temperature": temperature,
            "epsilon": epsilon,
            "i_zero": reference.i_zero,
            "i_zero_stderr": reference.i_zero_stderr,
            "t_c": reference.correlation_time,
            "predicted_rate": predicted_rate(reference, epsilon),
            "rate_law_valid": rate_law_validity(epsilon, reference.correlation_time),
            "d_fit": fit.rate if fit else None,
            "d_fit_stderr": fit.stderr if fit else None,
            "fit_window": [fit.t_start, fit.t_end] if fit else None,
            "rate_law_ratio": rate_law_ratio(fit, reference, epsilon) if fit else None,
        }
        entry["short_time_exponent"] = self._short_time(series, reference.correlation_time)
        if fit:
            self.logger.info(f"T={temperature}, eps={epsilon}: D_fit={fit.rate:.4g}, "
                             f"2 eps^2 I(0)={entry['predicted_rate']:.4g}")
        return entry

    def _short_time(self, series, t_c: float) -> Optional[float]:
        try:
            return short_time_exponent(series, 0.2 * t_c)
        except EstimationError as e:
            self.logger.warning(f"Short-time exponent unavailable: {e}")
            return None
