"""
Dense operators for one and two qubits.

Basis index 0 is |1> and index 1 is |-1>, so sigma^3 = diag(1, -1) and the
usual Pauli matrices apply. Two-qubit operators use the slot order (A, B).
"""
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..core.errors import DimensionError, InvalidParameterError

QUBIT_DIM = 2

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-9

_PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class StateCheck:
    """Deviations of a matrix from being a density matrix."""
    hermiticity: float
    trace_error: float
    min_eigenvalue: float
    finite: bool

    def is_valid(self, hermitian_tol: float = HERMITIAN_TOL, trace_tol: float = TRACE_TOL,
                 positivity_tol: float = POSITIVITY_TOL) -> bool:
        return (self.finite
                and self.hermiticity <= hermitian_tol
                and self.trace_error <= trace_tol
                and self.min_eigenvalue >= -positivity_tol)


def identity(n_slots: int = 1) -> np.ndarray:
    return np.eye(QUBIT_DIM**n_slots, dtype=complex)


def embed(op: np.ndarray, slot: int = 0, n_slots: int = 1) -> np.ndarray:
    """op acting on ``slot``, identity on the other slots."""
    if not 0 <= slot < n_slots:
        raise InvalidParameterError(f"slot must lie in [0, {n_slots}), got {slot}")
    op = np.asarray(op, dtype=complex)
    if op.shape != (QUBIT_DIM, QUBIT_DIM):
        raise DimensionError(f"expected a single-qubit operator, got shape {op.shape}")
    result = np.ones((1, 1), dtype=complex)
    for position in range(n_slots):
        result = np.kron(result, op if position == slot else np.eye(QUBIT_DIM))
    return result


def pauli(k: int, slot: int = 0, n_slots: int = 1) -> np.ndarray:
    """sigma^k (k = 1, 2, 3) in ``slot`` of an n_slots-qubit register."""
    if k not in _PAULI:
        raise InvalidParameterError(f"Pauli axis must be 1, 2 or 3, got {k}")
    return embed(_PAULI[k], slot, n_slots)


def sigma_plus(slot: int = 0, n_slots: int = 1) -> np.ndarray:
    """sigma^+ = (sigma^2 + i sigma^3)/2, the raising operator of the sigma^1 eigenbasis."""
    return embed(0.5 * (_PAULI[2] + 1j * _PAULI[3]), slot, n_slots)


def sigma_minus(slot: int = 0, n_slots: int = 1) -> np.ndarray:
    """sigma^- = (sigma^2 - i sigma^3)/2."""
    return embed(0.5 * (_PAULI[2] - 1j * _PAULI[3]), slot, n_slots)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product a (x) b."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def partial_trace_B(rho: np.ndarray) -> np.ndarray:
    """Trace out the second qubit of a 4x4 operator."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise DimensionError(f"partial_trace_B expects a 4x4 operator, got shape {rho.shape}")
    return np.einsum("ajbj->ab", rho.reshape(2, 2, 2, 2))


def purity_coherence(rho: np.ndarray) -> float:
    """C = sqrt(2 Tr[rho^2] - 1), the length of the Bloch vector."""
    rho = np.asarray(rho)
    if rho.shape != (QUBIT_DIM, QUBIT_DIM):
        raise DimensionError(f"purity_coherence expects a qubit state, got shape {rho.shape}")
    purity = float(np.real(np.trace(rho @ rho)))
    # roundoff can push 2 Tr rho^2 - 1 slightly below zero
    return float(np.sqrt(max(2.0 * purity - 1.0, 0.0)))


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    """(Tr[rho sigma^1], Tr[rho sigma^2], Tr[rho sigma^3])."""
    return np.array([np.real(np.trace(rho @ _PAULI[k])) for k in (1, 2, 3)])


def check_density_matrix(rho: np.ndarray) -> StateCheck:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {rho.shape}")
    finite = bool(np.all(np.isfinite(rho)))
    if not finite:
        return StateCheck(np.inf, np.inf, -np.inf, False)
    hermiticity = float(np.max(np.abs(rho - rho.conj().T)))
    trace_error = float(abs(np.trace(rho) - 1.0))
    min_eigenvalue = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    return StateCheck(hermiticity, trace_error, min_eigenvalue, True)


def projector(state: np.ndarray) -> np.ndarray:
    """|psi><psi| for a (not necessarily normalized) state vector."""
    psi = np.asarray(state, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise InvalidParameterError("state vector must be nonzero")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def random_density_matrix(dim: int, seed: Union[int, np.random.Generator, None] = None,
                          rank: Optional[int] = None) -> np.ndarray:
    """Random state rho = G G^dagger / Tr from a complex Ginibre matrix."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
