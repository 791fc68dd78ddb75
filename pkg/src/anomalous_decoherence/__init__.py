"""Anomalous decoherence - probes dephased by non-linear classical and spin-boson baths.

This package simulates a double-well Langevin bath and a spin-boson bath,
estimates their spectra and the decoherence of a probe coupled to them.
"""

__version__ = "0.1.0"

from .core.config import ConfigManager, ExperimentConfig
from .core.errors import SimulationError
from .core.experiment import BaseExperiment, ExperimentOutput
from .core.runner import ExperimentRunner

__all__ = [
    'ConfigManager',
    'ExperimentConfig',
    'SimulationError',
    'BaseExperiment',
    'ExperimentOutput',
    'ExperimentRunner',
]
