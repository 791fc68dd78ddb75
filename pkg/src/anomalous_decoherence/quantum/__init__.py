"""
Quantum bath: qubit operators, master-equation integration and the spin-boson model.
"""

from .master import MasterTrajectory, integrate_master
from .operators import partial_trace_B, pauli, purity_coherence, sigma_minus, sigma_plus, tensor
from .spin_boson import (
    SpinBosonParams,
    analytic_solution,
    gamma_d,
    simulate_probe_coherence,
    spectral_function,
    two_time_correlation,
)

__all__ = [
    'MasterTrajectory',
    'integrate_master',
    'partial_trace_B',
    'pauli',
    'purity_coherence',
    'sigma_minus',
    'sigma_plus',
    'tensor',
    'SpinBosonParams',
    'analytic_solution',
    'gamma_d',
    'simulate_probe_coherence',
    'spectral_function',
    'two_time_correlation',
]
