"""
Core components shared by all experiments: configuration, errors,
the experiment contract, output writers and the runner.
"""

from .config import ConfigManager, ConfigSource, ExperimentConfig, thread_count
from .errors import (
    CapacityError,
    CutoffBiasWarning,
    DimensionError,
    EstimationError,
    ExperimentError,
    InsufficientDecayError,
    IntegrationError,
    InvalidParameterError,
    MissingPhaseError,
    SimulationError,
    ValidityWarning,
)
from .experiment import BaseExperiment, ExperimentInput, ExperimentOutput, ExperimentResult
from .runner import ExperimentRunner, RunRecord

__all__ = [
    'ConfigManager',
    'ConfigSource',
    'ExperimentConfig',
    'thread_count',
    'CapacityError',
    'CutoffBiasWarning',
    'DimensionError',
    'EstimationError',
    'ExperimentError',
    'InsufficientDecayError',
    'IntegrationError',
    'InvalidParameterError',
    'MissingPhaseError',
    'SimulationError',
    'ValidityWarning',
    'BaseExperiment',
    'ExperimentInput',
    'ExperimentOutput',
    'ExperimentResult',
    'ExperimentRunner',
    'RunRecord',
]
