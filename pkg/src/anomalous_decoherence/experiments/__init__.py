"""
Registered experiments, keyed by their command-line name.
"""
from typing import Dict, List, Type

from ..core.experiment import BaseExperiment
from .classical import ClassicalCoherence, ClassicalSpectrum, IZeroScan
from .spin_boson import SpinBosonCoherence, SpinBosonSpectrum

EXPERIMENTS: Dict[str, Type[BaseExperiment]] = {
    cls.name: cls
    for cls in (ClassicalSpectrum, IZeroScan, ClassicalCoherence,
                SpinBosonCoherence, SpinBosonSpectrum)
}


def create_experiments() -> List[BaseExperiment]:
    return [cls() for cls in EXPERIMENTS.values()]


__all__ = [
    "EXPERIMENTS",
    "ClassicalCoherence",
    "ClassicalSpectrum",
    "IZeroScan",
    "SpinBosonCoherence",
    "SpinBosonSpectrum",
    "create_experiments",
]
