"""
Autocorrelation and power spectrum of the bath coordinate.

I(w, T) = 2 Re int_0^t_max <x(0) x(t)>_T e^{iwt} dt, evaluated by trapezoidal
quadrature on the recorded lag grid.
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate, signal

from ..core.errors import CutoffBiasWarning, EstimationError
from .langevin import TrajectoryEnsemble

logger = logging.getLogger(__name__)

DEFAULT_OMEGA_MIN = -3.0
DEFAULT_OMEGA_MAX = 3.0
DEFAULT_OMEGA_STEP = 0.005
TAIL_WARNING_FRACTION = 0.05
# Autocorrelation values within this many standard errors of zero count as noise
# in the cutoff diagnostic.
NOISE_FLOOR_SIGMAS = 3.0
BLOCK_ROWS = 500


def default_omega_grid() -> np.ndarray:
    count = int(round((DEFAULT_OMEGA_MAX - DEFAULT_OMEGA_MIN) / DEFAULT_OMEGA_STEP)) + 1
    return np.linspace(DEFAULT_OMEGA_MIN, DEFAULT_OMEGA_MAX, count)


@dataclass(frozen=True)
class AutocorrelationEstimate:
    """C_x(t) on the lag grid with standard errors.

    ``samples`` holds the per-realization estimates (n x lags) when the
    estimate came from an ensemble; the spectrum uses them for error bars.
    """
    lags: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    n_realizations: int
    temperature: Optional[float] = None
    samples: Optional[np.ndarray] = field(default=None, repr=False)


class CorrelationTime(NamedTuple):
    value: float
    resolved: bool


@dataclass(frozen=True)
class SpectrumEstimate:
    """I(w, T) with the derived zero-frequency scalars."""
    omega: np.ndarray
    intensity: np.ndarray
    stderr: np.ndarray
    i_zero: float
    i_zero_stderr: float
    k_zero: float
    k_zero_stderr: float
    correlation_time: float
    correlation_time_resolved: bool
    tail_fraction: float
    temperature: Optional[float] = None
    n_realizations: int = 0


def trapezoid_weights(t: np.ndarray) -> np.ndarray:
    """Weights w such that w @ f equals the trapezoid rule on grid t."""
    t = np.asarray(t, dtype=float)
    weights = np.zeros_like(t)
    if t.size < 2:
        return weights
    widths = np.diff(t)
    weights[:-1] += 0.5 * widths
    weights[1:] += 0.5 * widths
    return weights


def _transform_matrix(lags: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Real kernel K (lags x omega) with I = C @ K for real C."""
    weights = trapezoid_weights(lags)
    return 2.0 * weights[:, None] * np.cos(np.outer(lags, omega))


def one_sided_transform(lags: np.ndarray, values: np.ndarray, omega) -> np.ndarray:
    """2 Re int_0^t_max C(t) e^{iwt} dt for real or complex C."""
    lags = np.asarray(lags, dtype=float)
    values = np.asarray(values)
    omega_arr = np.atleast_1d(np.asarray(omega, dtype=float))
    weights = trapezoid_weights(lags)
    phases = np.outer(omega_arr, lags)
    result = 2.0 * (np.cos(phases) @ (weights * values.real)
                    - np.sin(phases) @ (weights * np.imag(values)))
    return result if np.ndim(omega) else result[0]


def autocorrelation(ensemble: TrajectoryEnsemble, time_average: bool = False,
                    max_lag: Optional[float] = None) -> AutocorrelationEstimate:
    """Ensemble estimate of <x(0) x(t)>.

    By default the reference time is 0, which relies on equilibrium initial
    conditions. With ``time_average`` every reference time in the record is
    used (unbiased Wiener-Khinchin estimate), which lowers the variance;
    ``max_lag`` then defaults to half the record.

    Raises:
        EstimationError: if fewer than two realizations are available
    """
    n = ensemble.n_realizations
    if n < 2:
        raise EstimationError("at least two realizations are needed for standard errors")
    if not ensemble.equilibrium_start and not time_average:
        logger.warning("Ensemble was not started in equilibrium; stationarity is assumed")

    times = ensemble.times
    if max_lag is None:
        max_lag = times[-1] / 2 if time_average else times[-1]
    n_lags = int(np.searchsorted(times, max_lag + 0.5 * ensemble.record_dt))
    n_lags = max(1, min(n_lags, times.size))
    x = ensemble.x

    if time_average:
        samples = _time_averaged_products(x, n_lags)
    else:
        samples = x[:, :1] * x[:, :n_lags]

    values = samples.mean(axis=0)
    stderr = samples.std(axis=0, ddof=1) / math.sqrt(n)
    return AutocorrelationEstimate(
        lags=times[:n_lags].copy(),
        values=values,
        stderr=stderr,
        n_realizations=n,
        temperature=ensemble.params.temperature,
        samples=samples,
    )


def _time_averaged_products(x: np.ndarray, n_lags: int) -> np.ndarray:
    n, length = x.shape
    n_fft = 1 << (2 * length - 1).bit_length()
    counts = length - np.arange(n_lags)
    out = np.empty((n, n_lags))
    for lo in range(0, n, BLOCK_ROWS):
        block = np.fft.rfft(x[lo:lo + BLOCK_ROWS], n_fft, axis=1)
        power = np.fft.irfft(block * block.conj(), n_fft, axis=1)
        out[lo:lo + BLOCK_ROWS] = power[:, :n_lags] / counts
    return out


def correlation_time(ac: AutocorrelationEstimate) -> CorrelationTime:
    """First lag at which C_x(t)/C_x(0) drops below 1/e, linearly interpolated.

    Returns (t_max, resolved=False) when no crossing occurs in the record.
    """
    c0 = ac.values[0]
    if not c0 > 0:
        raise EstimationError(f"C_x(0) must be positive, got {c0}")
    ratio = ac.values / c0
    threshold = math.exp(-1.0)
    below = np.nonzero(ratio < threshold)[0]
    if below.size == 0:
        return CorrelationTime(float(ac.lags[-1]), False)
    k = int(below[0])
    t0, t1 = ac.lags[k - 1], ac.lags[k]
    r0, r1 = ratio[k - 1], ratio[k]
    return CorrelationTime(float(t0 + (r0 - threshold) * (t1 - t0) / (r0 - r1)), True)


def tail_fraction(ac: AutocorrelationEstimate) -> float:
    """Share of the |C_x| mass beyond t_max/2, ignoring values at the noise floor."""
    magnitude = np.abs(ac.values)
    if np.all(np.isfinite(ac.stderr)):
        magnitude = np.where(magnitude > NOISE_FLOOR_SIGMAS * ac.stderr, magnitude, 0.0)
    total = integrate.trapezoid(magnitude, ac.lags)
    if total <= 0:
        return 0.0
    tail = ac.lags >= ac.lags[-1] / 2
    return float(integrate.trapezoid(magnitude[tail], ac.lags[tail]) / total)


def spectrum(ac: AutocorrelationEstimate, omega_grid: Optional[np.ndarray] = None) -> SpectrumEstimate:
    """I(w, T) on omega_grid plus I(0,T), K(0,T) = I(0,T)/T and t_c.

    Standard errors come from the spread of the per-realization transforms
    and are NaN when the estimate carries no samples. A tail of |C_x|
    exceeding 5 % of its mass beyond t_max/2 raises a CutoffBiasWarning.
    """
    omega = default_omega_grid() if omega_grid is None else np.asarray(omega_grid, dtype=float)
    intensity = one_sided_transform(ac.lags, ac.values, omega)
    zero_weights = 2.0 * trapezoid_weights(ac.lags)
    i_zero = float(zero_weights @ ac.values)

    if ac.samples is not None and ac.n_realizations > 1:
        stderr, i_zero_stderr = _transform_stderr(ac, omega, zero_weights)
    else:
        stderr = np.full(omega.shape, math.nan)
        i_zero_stderr = math.nan

    temperature = ac.temperature
    if temperature is not None and temperature > 0:
        k_zero = i_zero / temperature
        k_zero_stderr = i_zero_stderr / temperature
    else:
        k_zero = k_zero_stderr = math.nan

    t_c = correlation_time(ac)
    tail = tail_fraction(ac)
    if tail > TAIL_WARNING_FRACTION:
        message = (f"|C_x| tail beyond t_max/2 holds {tail:.1%} of its mass; "
                   "the spectrum may be biased by the time cut-off")
        logger.warning(message)
        warnings.warn(message, CutoffBiasWarning, stacklevel=2)

    return SpectrumEstimate(
        omega=omega,
        intensity=intensity,
        stderr=stderr,
        i_zero=i_zero,
        i_zero_stderr=i_zero_stderr,
        k_zero=k_zero,
        k_zero_stderr=k_zero_stderr,
        correlation_time=t_c.value,
        correlation_time_resolved=t_c.resolved,
        tail_fraction=tail,
        temperature=temperature,
        n_realizations=ac.n_realizations,
    )


def _transform_stderr(ac: AutocorrelationEstimate, omega: np.ndarray,
                      zero_weights: np.ndarray):
    samples = ac.samples
    n = samples.shape[0]
    kernel = _transform_matrix(ac.lags, omega)
    total = np.zeros(omega.size)
    total_sq = np.zeros(omega.size)
    for lo in range(0, n, BLOCK_ROWS):
        block = samples[lo:lo + BLOCK_ROWS] @ kernel
        total += block.sum(axis=0)
        total_sq += (block * block).sum(axis=0)
    mean = total / n
    variance = np.maximum(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    zero = samples @ zero_weights
    return np.sqrt(variance / n), float(zero.std(ddof=1) / math.sqrt(n))


def spectral_peaks(estimate: SpectrumEstimate, prominence: float = 0.0) -> np.ndarray:
    """Frequencies of the local maxima of I(w)."""
    indices, _ = signal.find_peaks(estimate.intensity, prominence=prominence)
    return estimate.omega[indices]
