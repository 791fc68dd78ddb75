"""
Fixed-step fourth-order integration of linear master equations.

The right-hand side is linear in rho, so one RK4 step is the matrix
polynomial P = I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24 of the superoperator
L. Strides between records are taken with integer powers of P, which gives
the same result as stepping one dt at a time. For density matrices P acts
on real Hermitian coordinates with the trace row pinned, so every step is
Hermitian and trace-normalized.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core.errors import DimensionError, IntegrationError, InvalidParameterError
from .operators import check_density_matrix

logger = logging.getLogger(__name__)

MasterRHS = Callable[[np.ndarray], np.ndarray]

DEFAULT_DT_SCALE = 1e-3
INVARIANT_TOL = 1e-6


@dataclass(frozen=True)
class MasterTrajectory:
    """States rho(t_k) of shape (n_records, d, d)."""
    times: np.ndarray
    states: np.ndarray
    dt: float

    def expectation(self, op: np.ndarray) -> np.ndarray:
        """Tr[op rho(t_k)] for every record."""
        return np.einsum("ij,nji->n", op, self.states)


def default_dt(*rates: float) -> float:
    """1e-3 / max(rates..., 1)."""
    return DEFAULT_DT_SCALE / max(max(rates, default=1.0), 1.0)


def superoperator_matrix(rhs: MasterRHS, dim: int) -> np.ndarray:
    """Matrix L with vec(rhs(rho)) = L vec(rho), vec in row-major order."""
    size = dim * dim
    superop = np.empty((size, size), dtype=complex)
    unit = np.zeros(size, dtype=complex)
    for j in range(size):
        unit[j] = 1.0
        image = np.asarray(rhs(unit.reshape(dim, dim)), dtype=complex)
        if image.shape != (dim, dim):
            raise DimensionError(f"rhs returned shape {image.shape}, expected {(dim, dim)}")
        superop[:, j] = image.ravel()
        unit[j] = 0.0
    return superop


def rk4_propagator(superop: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step of d vec/dt = L vec, as a matrix."""
    h_l = dt * superop
    term = np.eye(superop.shape[0], dtype=complex)
    propagator = term.copy()
    for order in range(1, 5):
        term = term @ h_l / order
        propagator += term
    return propagator


def hermitian_basis(dim: int) -> np.ndarray:
    """Unitary matrix whose columns are vec of an orthonormal Hermitian basis.

    Column 0 is vec(I)/sqrt(dim), so the first coordinate of a state is its
    trace over sqrt(dim). The remaining columns are traceless.
    """
    columns = [np.eye(dim, dtype=complex).ravel() / math.sqrt(dim)]
    for level in range(1, dim):
        diagonal = np.zeros(dim)
        diagonal[:level] = 1.0
        diagonal[level] = -level
        columns.append(np.diag(diagonal).astype(complex).ravel() / math.sqrt(level * (level + 1)))
    scale = 1.0 / math.sqrt(2.0)
    for i in range(dim):
        for j in range(i + 1, dim):
            symmetric = np.zeros((dim, dim), dtype=complex)
            symmetric[i, j] = symmetric[j, i] = scale
            antisymmetric = np.zeros((dim, dim), dtype=complex)
            antisymmetric[i, j] = -1j * scale
            antisymmetric[j, i] = 1j * scale
            columns.extend([symmetric.ravel(), antisymmetric.ravel()])
    return np.array(columns).T


def state_propagator(propagator: np.ndarray, basis: np.ndarray, tol: float = INVARIANT_TOL,
                     dt: float = 0.0) -> np.ndarray:
    """One step as a real map on Hermitian coordinates that keeps the trace fixed.

    Taking the real part re-Hermitizes the state and pinning the first row to
    e_0 renormalizes its trace, after every single step, including those
    inside a matrix-power stride.

    Raises:
        IntegrationError: if one step leaks more than tol out of the Hermitian
            matrices or changes the trace by more than tol
    """
    in_basis = basis.conj().T @ propagator @ basis
    leak = float(np.abs(in_basis.imag).max())
    if leak > tol:
        raise IntegrationError(f"state lost Hermiticity ({leak:.3g}) in one step", dt)
    unit = np.zeros(in_basis.shape[0])
    unit[0] = 1.0
    drift = float(np.abs(in_basis[0] - unit).max())
    if drift > tol:
        raise IntegrationError(f"trace drifted by {drift:.3g} in one step", dt)
    step = in_basis.real.copy()
    step[0] = unit
    return step


def integrate_master(rhs: MasterRHS, rho0: np.ndarray, dt: float, t_max: float,
                     record_every: int = 1, enforce_state: bool = True,
                     check_tol: float = INVARIANT_TOL) -> MasterTrajectory:
    """Integrate d rho/dt = rhs(rho) from rho0 on [0, t_max] with RK4 steps of dt.

    States are recorded every ``record_every`` steps and at t_max. With
    ``enforce_state`` every step is followed by re-Hermitization and trace
    renormalization (see ``state_propagator``), and each recorded state must
    be a density matrix within ``check_tol``. Turn it off to propagate
    non-Hermitian operators.

    Raises:
        InvalidParameterError: on dt <= 0, t_max < 0 or record_every < 1
        IntegrationError: on non-finite entries or an invariant breach
    """
    if not dt > 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    if t_max < 0:
        raise InvalidParameterError(f"t_max must be non-negative, got {t_max}")
    if record_every < 1:
        raise InvalidParameterError(f"record_every must be at least 1, got {record_every}")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim != 2 or rho0.shape[0] != rho0.shape[1]:
        raise DimensionError(f"rho0 must be square, got shape {rho0.shape}")
    dim = rho0.shape[0]

    n_steps = int(round(t_max / dt))
    strides = [record_every] * (n_steps // record_every)
    if n_steps % record_every:
        strides.append(n_steps % record_every)

    propagator = rk4_propagator(superoperator_matrix(rhs, dim), dt)
    basis = hermitian_basis(dim) if enforce_state else None
    if basis is not None:
        propagator = state_propagator(propagator, basis, check_tol, dt)
        vec = (basis.conj().T @ rho0.ravel()).real
    else:
        vec = rho0.ravel().copy()
    stride_ops = {s: np.linalg.matrix_power(propagator, s) for s in set(strides)}
    logger.debug(f"Integrating {n_steps} steps of dt={dt:.3g} in {len(strides)} strides")

    states = np.empty((len(strides) + 1, dim, dim), dtype=complex)
    times = np.empty(len(strides) + 1)
    states[0] = rho0
    times[0] = 0.0
    step_count = 0
    for k, stride in enumerate(strides, start=1):
        vec = stride_ops[stride] @ vec
        step_count += stride
        t = step_count * dt
        rho = (vec if basis is None else basis @ vec).reshape(dim, dim)
        if not np.all(np.isfinite(rho)):
            raise IntegrationError("master equation integration produced non-finite entries", t)
        if enforce_state:
            rho = _restore_state(rho, check_tol, t)
        states[k] = rho
        times[k] = t

    return MasterTrajectory(times=times, states=states, dt=dt)


def _restore_state(rho: np.ndarray, tol: float, t: float) -> np.ndarray:
    check = check_density_matrix(rho)
    if check.trace_error > tol:
        raise IntegrationError(f"trace drifted by {check.trace_error:.3g}", t)
    if check.hermiticity > tol:
        raise IntegrationError(f"state lost Hermiticity ({check.hermiticity:.3g})", t)
    if check.min_eigenvalue < -tol:
        raise IntegrationError(f"state lost positivity (min eigenvalue {check.min_eigenvalue:.3g})", t)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def evolve_stepwise(rhs: MasterRHS, rho0: np.ndarray, dt: float, n_steps: int) -> np.ndarray:
    """Plain RK4 loop calling rhs at every stage; a reference for the propagator form."""
    rho = np.asarray(rho0, dtype=complex)
    for _ in range(n_steps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(rho)):
        raise IntegrationError("master equation integration produced non-finite entries",
                               n_steps * dt)
    return rho


def steps_per_record(record_dt: float, max_dt: float) -> int:
    """Smallest stride such that record_dt / stride <= max_dt."""
    return max(1, math.ceil(record_dt / max_dt - 1e-9))
