"""
Classical bath: Langevin dynamics, spectral estimation and probe dephasing.
"""

from .dephasing import CoherenceSeries, DecoherenceFit, coherence_series, fit_decoherence_rate
from .langevin import (
    ClassicalBathParams,
    PhysicalParams,
    TrajectoryEnsemble,
    TrajectoryState,
    kramers_rate,
    sample_equilibrium,
    simulate_ensemble,
    step,
)
from .spectral import (
    AutocorrelationEstimate,
    SpectrumEstimate,
    autocorrelation,
    correlation_time,
    spectrum,
)

__all__ = [
    'CoherenceSeries',
    'DecoherenceFit',
    'coherence_series',
    'fit_decoherence_rate',
    'ClassicalBathParams',
    'PhysicalParams',
    'TrajectoryEnsemble',
    'TrajectoryState',
    'kramers_rate',
    'sample_equilibrium',
    'simulate_ensemble',
    'step',
    'AutocorrelationEstimate',
    'SpectrumEstimate',
    'autocorrelation',
    'correlation_time',
    'spectrum',
]
