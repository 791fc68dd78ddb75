"""
Dephasing of a two-level probe by the classical bath.

The probe coherence is C(t) = |<exp(i phi(t))>| with phi(t) = 2 eps int_0^t x dt'.
In the Markov regime it decays as exp(-D t) with D(T) = 2 eps^2 I(0, T).
"""
import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from ..core.errors import (
    InsufficientDecayError,
    InvalidParameterError,
    MissingPhaseError,
    ValidityWarning,
)
from .langevin import TrajectoryEnsemble
from .spectral import SpectrumEstimate

logger = logging.getLogger(__name__)

DEFAULT_FIT_WINDOW = (0.2, 0.8)
COLUMN_BLOCK = 256


@dataclass(frozen=True)
class DecoherenceFit:
    """Least-squares fit of ln C(t) = const - rate * t."""
    rate: float
    stderr: float
    t_start: float
    t_end: float
    n_points: int
    residual: float


@dataclass(frozen=True)
class CoherenceSeries:
    times: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    epsilon: float = 0.0
    temperature: Optional[float] = None
    fit: Optional[DecoherenceFit] = None

    def with_fit(self, window: Tuple[float, float] = DEFAULT_FIT_WINDOW) -> "CoherenceSeries":
        return replace(self, fit=fit_decoherence_rate(self, window))


def coherence_series(ensemble: TrajectoryEnsemble, fit: bool = True) -> CoherenceSeries:
    """C(t_k) = |mean_j exp(i phi_j(t_k))| with delta-method standard errors.

    When ``fit`` is set the decoherence rate is fitted as well; a series
    that decays too little is returned without a fit and a warning is logged.

    Raises:
        MissingPhaseError: if the ensemble was recorded without phases
        InvalidParameterError: if the probe frequency is not zero
    """
    if not ensemble.has_phases:
        raise MissingPhaseError("ensemble was recorded without probe phases; "
                                "simulate with record_phase=True")
    params = ensemble.params
    if params.omega != 0:
        raise InvalidParameterError(f"the dephasing probe requires omega = 0, got {params.omega}")

    phase = ensemble.phase
    n, n_records = phase.shape
    values = np.empty(n_records)
    stderr = np.empty(n_records)
    for lo in range(0, n_records, COLUMN_BLOCK):
        block = phase[:, lo:lo + COLUMN_BLOCK]
        values[lo:lo + COLUMN_BLOCK], stderr[lo:lo + COLUMN_BLOCK] = _phasor_modulus(block)
    values[0] = 1.0
    stderr[0] = 0.0

    series = CoherenceSeries(
        times=ensemble.times,
        values=values,
        stderr=stderr,
        epsilon=params.epsilon,
        temperature=params.temperature,
    )
    if not fit:
        return series
    try:
        return series.with_fit()
    except InsufficientDecayError as e:
        logger.warning(f"No decoherence fit at T={params.temperature}, eps={params.epsilon}: {e}")
        return series


def _phasor_modulus(phase: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = phase.shape[0]
    cos = np.cos(phase)
    sin = np.sin(phase)
    re = cos.mean(axis=0)
    im = sin.mean(axis=0)
    modulus = np.hypot(re, im)
    if n < 2:
        return modulus, np.zeros_like(modulus)
    var_re = cos.var(axis=0, ddof=1)
    var_im = sin.var(axis=0, ddof=1)
    cov = ((cos - re) * (sin - im)).sum(axis=0) / (n - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        grad_var = (re * re * var_re + im * im * var_im + 2.0 * re * im * cov) / (modulus * modulus)
    # At |mean| = 0 the gradient is undefined; fall back to the isotropic spread.
    grad_var = np.where(modulus > 0, grad_var, 0.5 * (var_re + var_im))
    return modulus, np.sqrt(np.maximum(grad_var, 0.0) / n)


def fit_decoherence_rate(series: CoherenceSeries,
                         window: Tuple[float, float] = DEFAULT_FIT_WINDOW) -> DecoherenceFit:
    """Fit -d ln C/dt over the window where C falls from window[1] to window[0].

    The window opens at the first sample below the upper bound and closes
    before the first sample below the lower bound (or at the end of the
    series).

    Raises:
        InsufficientDecayError: if C never drops below the upper bound
    """
    low, high = window
    if not 0 < low < high <= 1:
        raise InvalidParameterError(f"fit window must satisfy 0 < low < high <= 1, got {window}")
    values = np.asarray(series.values, dtype=float)
    times = np.asarray(series.times, dtype=float)

    below_high = np.nonzero(values < high)[0]
    if below_high.size == 0:
        raise InsufficientDecayError(
            f"coherence stayed above {high} up to t = {times[-1]:.6g}; "
            "increase t_max or use a larger epsilon"
        )
    start = int(below_high[0])
    below_low = np.nonzero(values[start:] < low)[0]
    stop = start + int(below_low[0]) if below_low.size else values.size
    if stop - start < 2:
        raise InsufficientDecayError(
            f"only {stop - start} sample(s) between C = {high} and C = {low}; "
            "record more densely or use a smaller epsilon"
        )

    t = times[start:stop]
    log_c = np.log(values[start:stop])
    result = stats.linregress(t, log_c)
    residual = float(np.sqrt(np.mean((log_c - (result.intercept + result.slope * t)) ** 2)))
    return DecoherenceFit(
        rate=float(-result.slope),
        stderr=float(result.stderr),
        t_start=float(t[0]),
        t_end=float(t[-1]),
        n_points=int(t.size),
        residual=residual,
    )


def short_time_exponent(series: CoherenceSeries, t_end: float) -> float:
    """Log-log slope of 1 - C(t) over 0 < t <= t_end; 2 in the Gaussian-phase regime."""
    times = np.asarray(series.times, dtype=float)
    deficit = 1.0 - np.asarray(series.values, dtype=float)
    mask = (times > 0) & (times <= t_end) & (deficit > 0)
    if np.count_nonzero(mask) < 2:
        raise InsufficientDecayError(f"fewer than two usable samples in (0, {t_end}]")
    result = stats.linregress(np.log(times[mask]), np.log(deficit[mask]))
    return float(result.slope)


def predicted_rate(estimate: SpectrumEstimate, epsilon: float) -> float:
    """D(T) = 2 eps^2 I(0, T)."""
    return 2.0 * epsilon**2 * estimate.i_zero


def rate_law_ratio(fit: DecoherenceFit, estimate: SpectrumEstimate, epsilon: float) -> float:
    """D_fit / (2 eps^2 I(0, T)); close to 1 when the rate law holds."""
    predicted = predicted_rate(estimate, epsilon)
    if predicted == 0:
        return math.nan
    return fit.rate / predicted


def rate_law_validity(epsilon: float, correlation_time: float) -> bool:
    """Markov condition 2 eps t_c < 1; warns when it fails."""
    valid = 2.0 * epsilon * correlation_time < 1.0
    if not valid:
        message = (f"rate law outside its validity range: 2*eps*t_c = "
                   f"{2.0 * epsilon * correlation_time:.3g} >= 1")
        logger.warning(message)
        warnings.warn(message, ValidityWarning, stacklevel=2)
    return valid
