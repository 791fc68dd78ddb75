"""
Exception and warning types shared by the simulation packages.
"""
from typing import Optional


class SimulationError(Exception):
    """Base exception for simulation-related errors."""
    pass


class InvalidParameterError(SimulationError, ValueError):
    """A model or numerical parameter lies outside its physical range."""
    pass


class DimensionError(SimulationError, ValueError):
    """An operator or state has the wrong dimension."""
    pass


class CapacityError(SimulationError):
    """The requested ensemble does not fit in the configured memory budget."""

    def __init__(self, requested_bytes: int, budget_bytes: int):
        self.requested_bytes = requested_bytes
        self.budget_bytes = budget_bytes
        super().__init__(
            f"Ensemble needs {requested_bytes} bytes, budget is {budget_bytes} bytes; "
            "reduce n, t_max or increase record_every"
        )


class EstimationError(SimulationError):
    """An estimator cannot be evaluated on the given data."""
    pass


class MissingPhaseError(EstimationError):
    """Coherence was requested on an ensemble recorded without probe phases."""
    pass


class InsufficientDecayError(EstimationError):
    """Coherence never decayed far enough to fit a rate."""
    pass


class IntegrationError(SimulationError):
    """A numerical integration diverged or violated a state invariant."""

    def __init__(self, message: str, time: Optional[float] = None):
        self.time = time
        if time is not None:
            message = f"{message} (t = {time:.6g})"
        super().__init__(message)


class ExperimentError(SimulationError):
    """Base exception for experiment-level failures."""
    pass


class CutoffBiasWarning(UserWarning):
    """The autocorrelation has not decayed within the record."""
    pass


class ValidityWarning(UserWarning):
    """An approximation the model relies on is not satisfied."""
    pass
