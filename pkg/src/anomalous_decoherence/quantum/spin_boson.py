"""
Spin-boson bath B and the probe qubit A coupled to it.

B evolves under
    d rho_B/dt = -i (Delta/2) [sigma^1_B, rho_B] + L rho_B
with the thermal dissipator L at rescaled temperature T~ = T/Delta. In the
frame rotating with the bare Hamiltonian (Delta sigma^1_A + Delta sigma^1_B)/2
the probe couples through the flip-flop term
    H = eps (sigma^+_A sigma^-_B + sigma^-_A sigma^+_B).
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np
from scipy import special

from ..classical.dephasing import DEFAULT_FIT_WINDOW, CoherenceSeries, DecoherenceFit, fit_decoherence_rate
from ..core.errors import InvalidParameterError, ValidityWarning
from .master import MasterTrajectory, default_dt, integrate_master, steps_per_record
from .operators import (
    check_density_matrix,
    commutator,
    identity,
    pauli,
    projector,
    sigma_minus,
    sigma_plus,
)

logger = logging.getLogger(__name__)

# validity thresholds of the two rotating-wave approximations
MIN_DELTA_TAU_C = 10.0
MAX_EPSILON_TAU_C = 0.1

DEFAULT_N_RECORDS = 2000
DEFAULT_DECAY_SPAN = 3.0

_SX = pauli(1)
_SY = pauli(2)
_SZ = pauli(3)
_SP = sigma_plus()
_SM = sigma_minus()
_SP_A = sigma_plus(0, 2)
_SM_A = sigma_minus(0, 2)
_SP_B = sigma_plus(1, 2)
_SM_B = sigma_minus(1, 2)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class SpinBosonParams:
    """Bath and probe parameters (hbar = k_B = 1).

    Attributes:
        delta: Tunneling frequency of B
        gamma_b: Bath decay coefficient
        epsilon: Probe coupling
        t_tilde: Rescaled temperature T/Delta
        omega_probe: Probe frequency; the coupled model requires it to equal delta
    """
    delta: float
    gamma_b: float
    t_tilde: float
    epsilon: float = 0.0
    omega_probe: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise InvalidParameterError(f"delta must be positive, got {self.delta}")
        if self.gamma_b < 0:
            raise InvalidParameterError(f"gamma_b must be non-negative, got {self.gamma_b}")
        if self.epsilon < 0:
            raise InvalidParameterError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.t_tilde < 0:
            raise InvalidParameterError(f"t_tilde must be non-negative, got {self.t_tilde}")
        if self.omega_probe is None:
            object.__setattr__(self, "omega_probe", self.delta)
        elif not math.isclose(self.omega_probe, self.delta, rel_tol=1e-12):
            raise InvalidParameterError(
                f"the probe must be resonant with the bath: omega_probe={self.omega_probe}, "
                f"delta={self.delta}"
            )

    @property
    def tanh_factor(self) -> float:
        """tanh(1/(2 T~)); 1 at T~ = 0."""
        if self.t_tilde == 0:
            return 1.0
        return math.tanh(0.5 / self.t_tilde)

    @property
    def n_bar(self) -> float:
        """Bose occupation [exp(1/T~) - 1]^-1."""
        if self.t_tilde == 0:
            return 0.0
        return 1.0 / math.expm1(1.0 / self.t_tilde)

    @property
    def n_up(self) -> float:
        """Thermal population of the upper sigma^1 eigenstate."""
        if self.t_tilde == 0:
            return 0.0
        return float(special.expit(-1.0 / self.t_tilde))

    @property
    def n_down(self) -> float:
        return 1.0 - self.n_up

    @property
    def decay_rate(self) -> float:
        """1/tau_c = (2 n_bar + 1) gamma_b."""
        return self.gamma_b / self.tanh_factor

    @property
    def tau_c(self) -> float:
        if self.gamma_b == 0:
            return math.inf
        return self.tanh_factor / self.gamma_b

    @property
    def quantum_dt(self) -> float:
        return default_dt(self.gamma_b, self.epsilon)


@dataclass(frozen=True)
class ValidityReport:
    delta_tau_c: float
    epsilon_tau_c: float
    rwa_bath: bool
    rwa_coupling: bool

    @property
    def ok(self) -> bool:
        return self.rwa_bath and self.rwa_coupling

    def as_dict(self) -> dict:
        return {
            "delta_tau_c": self.delta_tau_c,
            "epsilon_tau_c": self.epsilon_tau_c,
            "rwa_bath": self.rwa_bath,
            "rwa_coupling": self.rwa_coupling,
        }


def validity(params: SpinBosonParams, warn: bool = True) -> ValidityReport:
    """Check Delta tau_c >= 10 and eps tau_c <= 0.1; violations are reported, not raised."""
    delta_tau_c = params.delta * params.tau_c
    epsilon_tau_c = params.epsilon * params.tau_c if params.epsilon else 0.0
    report = ValidityReport(
        delta_tau_c=delta_tau_c,
        epsilon_tau_c=epsilon_tau_c,
        rwa_bath=delta_tau_c >= MIN_DELTA_TAU_C,
        rwa_coupling=epsilon_tau_c <= MAX_EPSILON_TAU_C,
    )
    if warn:
        if not report.rwa_bath:
            _warn_validity(f"Delta*tau_c = {delta_tau_c:.3g} < {MIN_DELTA_TAU_C}; "
                           "the bath rotating-wave approximation is poor")
        if not report.rwa_coupling:
            _warn_validity(f"eps*tau_c = {epsilon_tau_c:.3g} > {MAX_EPSILON_TAU_C}; "
                           "the coupling rotating-wave approximation is poor")
    return report


def _warn_validity(message: str) -> None:
    logger.warning(message)
    warnings.warn(message, ValidityWarning, stacklevel=3)


def _dissipate(rho: np.ndarray, sp: np.ndarray, sm: np.ndarray,
               gamma: float, n_bar: float) -> np.ndarray:
    """Thermal dissipator with ladder operators sp/sm, rate gamma and occupation n_bar."""
    smsp = sm @ sp
    spsm = sp @ sm
    absorption = smsp @ rho + rho @ smsp - 2.0 * sp @ rho @ sm
    emission = spsm @ rho + rho @ spsm - 2.0 * sm @ rho @ sp
    return -gamma * n_bar * absorption - gamma * (n_bar + 1.0) * emission


def steady_state_B(params: SpinBosonParams) -> np.ndarray:
    """rho_ss = (I - tanh(1/(2 T~)) sigma^1)/2."""
    return 0.5 * (identity() - params.tanh_factor * _SX)


def dissipator(rho_B: np.ndarray, params: SpinBosonParams) -> np.ndarray:
    return _dissipate(np.asarray(rho_B, dtype=complex), _SP, _SM, params.gamma_b, params.n_bar)


def master_rhs_B(rho_B: np.ndarray, params: SpinBosonParams) -> np.ndarray:
    rho_B = np.asarray(rho_B, dtype=complex)
    return -0.5j * params.delta * commutator(_SX, rho_B) + dissipator(rho_B, params)


def correlation_closed_form(params: SpinBosonParams, t: ArrayLike) -> np.ndarray:
    """exp(-|t|/tau_c) [n_up exp(-i Delta t) + n_down exp(i Delta t)]."""
    t = np.asarray(t, dtype=float)
    envelope = np.exp(-np.abs(t) * params.decay_rate)
    return envelope * (params.n_up * np.exp(-1j * params.delta * t)
                       + params.n_down * np.exp(1j * params.delta * t))


def two_time_correlation(params: SpinBosonParams, t_grid: Iterable[float],
                         dt: Optional[float] = None) -> np.ndarray:
    """<sigma^3(0) sigma^3(t)> by the quantum regression theorem.

    The operator rho_ss sigma^3 is propagated with the master equation of B
    and projected on sigma^3. ``t_grid`` must be uniform and start at 0.
    """
    t_grid = np.asarray(list(t_grid), dtype=float)
    if t_grid.size == 0 or t_grid[0] != 0:
        raise InvalidParameterError("t_grid must be non-empty and start at 0")
    if t_grid.size == 1:
        return np.ones(1, dtype=complex)
    spacing = np.diff(t_grid)
    record_dt = float(spacing[0])
    if not record_dt > 0 or not np.allclose(spacing, record_dt, rtol=1e-9, atol=0.0):
        raise InvalidParameterError("t_grid must be uniformly spaced and increasing")

    max_dt = params.quantum_dt if dt is None else dt
    record_every = steps_per_record(record_dt, max_dt)
    step = record_dt / record_every
    rho0 = steady_state_B(params) @ _SZ
    trajectory = integrate_master(lambda rho: master_rhs_B(rho, params), rho0, step,
                                  t_grid[-1], record_every=record_every, enforce_state=False)
    return trajectory.expectation(_SZ)[:t_grid.size]


def spectral_function(params: SpinBosonParams, omega: ArrayLike) -> ArrayLike:
    """2 tau_c n_up/(1 + tau_c^2 (w - Delta)^2) + 2 tau_c n_down/(1 + tau_c^2 (w + Delta)^2)."""
    if params.gamma_b == 0:
        raise InvalidParameterError("the spectral function needs gamma_b > 0")
    omega = np.asarray(omega, dtype=float)
    tau = params.tau_c
    delta = params.delta
    result = (2.0 * tau * params.n_up / (1.0 + (tau * (omega - delta)) ** 2)
              + 2.0 * tau * params.n_down / (1.0 + (tau * (omega + delta)) ** 2))
    return float(result) if result.ndim == 0 else result


def dominant_peak_height(params: SpinBosonParams) -> float:
    """Height 2 tau_c n_down of the n_down-weighted peak; decreasing in T~."""
    if params.gamma_b == 0:
        raise InvalidParameterError("the spectral function needs gamma_b > 0")
    return 2.0 * params.tau_c * params.n_down


def spectral_temperature_profile(delta: float, gamma_b: float, omega: float,
                                 t_tildes: Iterable[float]) -> np.ndarray:
    """I(omega) at fixed omega across a temperature grid."""
    return np.array([spectral_function(SpinBosonParams(delta=delta, gamma_b=gamma_b, t_tilde=t), omega)
                     for t in t_tildes])


def coupled_rhs(rho: np.ndarray, params: SpinBosonParams) -> np.ndarray:
    """Rotating-frame generator of the probe-bath pair (slot order A, B)."""
    rho = np.asarray(rho, dtype=complex)
    hamiltonian = params.epsilon * (_SP_A @ _SM_B + _SM_A @ _SP_B)
    return (-1j * commutator(hamiltonian, rho)
            + _dissipate(rho, _SP_B, _SM_B, params.gamma_b, params.n_bar))


def default_probe_state() -> np.ndarray:
    """(|-1> + |1>)/sqrt(2) projector, equal to (I + sigma^1)/2."""
    return projector(np.array([1.0, 1.0]))


def _validate_probe_state(rho_A0: np.ndarray) -> np.ndarray:
    rho_A0 = np.asarray(rho_A0, dtype=complex)
    if rho_A0.shape != (2, 2):
        raise InvalidParameterError(f"probe state must be 2x2, got shape {rho_A0.shape}")
    if not check_density_matrix(rho_A0).is_valid():
        raise InvalidParameterError("probe state is not a valid density matrix")
    return rho_A0


@dataclass(frozen=True)
class ProbeCoherence:
    """Numerical probe dynamics of the coupled model."""
    times: np.ndarray
    coherence: np.ndarray
    m_sigma1: np.ndarray
    reduced_states: np.ndarray
    params: SpinBosonParams
    trajectory: Optional[MasterTrajectory] = field(default=None, repr=False)

    def coherence_series(self) -> CoherenceSeries:
        return CoherenceSeries(
            times=self.times,
            values=self.coherence,
            stderr=np.zeros_like(self.coherence),
            epsilon=self.params.epsilon,
            temperature=self.params.t_tilde,
        )

    def relaxation_series(self) -> CoherenceSeries:
        """|m(t) - m_eq| / |m(0) - m_eq| for the sigma^1 coefficient m, m_eq = -tanh(1/(2 T~))."""
        shifted = self.m_sigma1 + self.params.tanh_factor
        scale = abs(shifted[0])
        if scale == 0:
            raise InvalidParameterError("the probe starts in equilibrium along sigma^1")
        values = np.abs(shifted) / scale
        return CoherenceSeries(
            times=self.times,
            values=values,
            stderr=np.zeros_like(values),
            epsilon=self.params.epsilon,
            temperature=self.params.t_tilde,
        )

    def fit_relaxation_rate(self, window=DEFAULT_FIT_WINDOW) -> DecoherenceFit:
        """Fitted decay rate of the shifted sigma^1 coefficient; 2 Gamma_d in theory."""
        return fit_decoherence_rate(self.relaxation_series(), window)


def simulate_probe_coherence(params: SpinBosonParams, rho_A0: Optional[np.ndarray] = None,
                             t_max: Optional[float] = None, dt: Optional[float] = None,
                             n_records: int = DEFAULT_N_RECORDS,
                             keep_trajectory: bool = False) -> ProbeCoherence:
    """Integrate the coupled model from rho_A0 (x) rho_ss and record C(t).

    t_max defaults to 3/Gamma_d and dt to 1e-3/max(gamma_b, eps, 1).

    Raises:
        InvalidParameterError: on an invalid probe state, or when t_max is
            omitted and Gamma_d = 0
        IntegrationError: if the state leaves the set of density matrices
    """
    rho_A0 = default_probe_state() if rho_A0 is None else _validate_probe_state(rho_A0)
    validity(params)
    if t_max is None:
        rate = gamma_d(params) if params.gamma_b > 0 else 0.0
        if rate == 0:
            raise InvalidParameterError("t_max is required when the decoherence rate vanishes")
        t_max = DEFAULT_DECAY_SPAN / rate
    if not t_max > 0:
        raise InvalidParameterError(f"t_max must be positive, got {t_max}")
    if n_records < 2:
        raise InvalidParameterError(f"n_records must be at least 2, got {n_records}")
    dt = params.quantum_dt if dt is None else dt
    record_every = max(1, int(round(t_max / dt / (n_records - 1))))

    rho0 = np.kron(rho_A0, steady_state_B(params))
    logger.debug(f"Coupled model T~={params.t_tilde}: t_max={t_max:.6g}, dt={dt:.3g}, "
                 f"stride={record_every}")
    trajectory = integrate_master(lambda rho: coupled_rhs(rho, params), rho0, dt, t_max,
                                  record_every=record_every)
    reduced = np.einsum("najbj->nab", trajectory.states.reshape(-1, 2, 2, 2, 2))
    purity = np.real(np.einsum("nij,nji->n", reduced, reduced))
    coherence = np.sqrt(np.maximum(2.0 * purity - 1.0, 0.0))
    m_sigma1 = np.real(np.einsum("ij,nji->n", _SX, reduced))
    return ProbeCoherence(
        times=trajectory.times,
        coherence=coherence,
        m_sigma1=m_sigma1,
        reduced_states=reduced,
        params=params,
        trajectory=trajectory if keep_trajectory else None,
    )


@dataclass(frozen=True)
class AnalyticSolutionCoeffs:
    """Weights of sigma^2 (c1), sigma^1 (c2) and sigma^3 (c3) in rho_A(0) - rho_th."""
    c1: float
    c2: float
    c3: float
    gamma_d: float


def gamma_d(params: SpinBosonParams) -> float:
    """Gamma_d = eps^2 tau_c = eps^2 tanh(1/(2 T~)) / gamma_b."""
    if not params.gamma_b > 0:
        raise InvalidParameterError(f"gamma_b must be positive, got {params.gamma_b}")
    return params.epsilon**2 * params.tanh_factor / params.gamma_b


def analytic_coefficients(params: SpinBosonParams,
                          rho_A0: Optional[np.ndarray] = None) -> AnalyticSolutionCoeffs:
    rho_A0 = default_probe_state() if rho_A0 is None else _validate_probe_state(rho_A0)
    difference = rho_A0 - steady_state_B(params)

    def weight(op: np.ndarray) -> float:
        return float(np.real(np.trace(difference @ op))) / 2.0

    return AnalyticSolutionCoeffs(c1=weight(_SY), c2=weight(_SX), c3=weight(_SZ),
                                  gamma_d=gamma_d(params))


def analytic_solution(params: SpinBosonParams, rho_A0: Optional[np.ndarray],
                      t: ArrayLike) -> np.ndarray:
    """rho_th + exp(-Gamma_d t)(c1 sigma^2 + c3 sigma^3) + exp(-2 Gamma_d t) c2 sigma^1.

    Returns shape (2, 2) for scalar t and (len(t), 2, 2) otherwise.
    """
    validity(params)
    coeffs = analytic_coefficients(params, rho_A0)
    t_arr = np.asarray(t, dtype=float)
    slow = np.asarray(np.exp(-coeffs.gamma_d * t_arr))[..., None, None]
    fast = np.asarray(np.exp(-2.0 * coeffs.gamma_d * t_arr))[..., None, None]
    return (steady_state_B(params)
            + slow * (coeffs.c1 * _SY + coeffs.c3 * _SZ)
            + fast * (coeffs.c2 * _SX))


def analytic_coherence(params: SpinBosonParams, rho_A0: Optional[np.ndarray],
                       t: ArrayLike) -> ArrayLike:
    """Bloch-vector length of the analytic solution."""
    coeffs = analytic_coefficients(params, rho_A0)
    t_arr = np.asarray(t, dtype=float)
    slow = np.exp(-coeffs.gamma_d * t_arr)
    fast = np.exp(-2.0 * coeffs.gamma_d * t_arr)
    m1 = -params.tanh_factor + 2.0 * coeffs.c2 * fast
    m2 = 2.0 * coeffs.c1 * slow
    m3 = 2.0 * coeffs.c3 * slow
    result = np.sqrt(m1 * m1 + m2 * m2 + m3 * m3)
    return float(result) if result.ndim == 0 else result


def effective_probe_rate(params: SpinBosonParams) -> float:
    """Rate of the probe's reduced dissipator, eps^2 tanh^2(1/(2 T~)) / gamma_b."""
    return gamma_d(params) * params.tanh_factor


def effective_probe_rhs(rho_A: np.ndarray, params: SpinBosonParams) -> np.ndarray:
    """Reduced master equation of the probe alone, in the rotating frame.

    Its exact solution is ``analytic_solution``.
    """
    return _dissipate(np.asarray(rho_A, dtype=complex), _SP, _SM,
                      effective_probe_rate(params), params.n_bar)
