"""
Experiment runner.
Keeps a registry of experiments and dispatches resolved configurations to them.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional

from .config import ExperimentConfig
from .experiment import EXIT_USAGE, BaseExperiment, ExperimentOutput


@dataclass
class RunRecord:
    """One completed run."""
    experiment: str
    config: ExperimentConfig
    output: ExperimentOutput


class ExperimentRunner:
    """Registry of experiments plus the history of runs made through it."""

    def __init__(self, experiments: Optional[Iterable[BaseExperiment]] = None,
                 n_workers: int = 1):
        self.experiments: Dict[str, BaseExperiment] = {}
        self.history: List[RunRecord] = []
        self.n_workers = n_workers
        self.logger = logging.getLogger("runner")
        for experiment in experiments or ():
            self.add_experiment(experiment)

    def add_experiment(self, experiment: BaseExperiment) -> None:
        if not isinstance(experiment, BaseExperiment):
            raise ValueError("experiment must be a BaseExperiment instance")
        self.experiments[experiment.name] = experiment

    def remove_experiment(self, name: str) -> bool:
        if name in self.experiments:
            del self.experiments[name]
            return True
        return False

    def get_experiment(self, name: str) -> Optional[BaseExperiment]:
        return self.experiments.get(name)

    def list_experiments(self) -> List[Dict[str, Any]]:
        """Name, description and CSV columns of every registered experiment."""
        return [
            {
                "name": experiment.name,
                "description": experiment.description,
                "columns": list(experiment.columns),
            }
            for experiment in self.experiments.values()
        ]

    async def run(self, config: ExperimentConfig, write: bool = True) -> ExperimentOutput:
        """Run the experiment named by ``config.experiment``."""
        experiment = self.get_experiment(config.experiment)
        if experiment is None:
            self.logger.error(f"No experiment registered as '{config.experiment}'")
            output = ExperimentOutput(
                success=False,
                message=f"Unknown experiment: {config.experiment}",
                error_type="ExperimentError",
                exit_code=EXIT_USAGE,
            )
        else:
            output = await experiment.execute(config=config, n_workers=self.n_workers, write=write)
        self.history.append(RunRecord(experiment=config.experiment, config=config, output=output))
        return output

    def reset(self) -> None:
        """Clear the run history; registered experiments are kept."""
        self.history = []
