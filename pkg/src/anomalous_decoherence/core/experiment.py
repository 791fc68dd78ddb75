"""
Experiment base class: validated input, async execution, CSV and sidecar output.
"""
import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type, TypeVar

from pydantic import BaseModel, Field

from .config import ExperimentConfig
from .errors import (
    CapacityError,
    DimensionError,
    ExperimentError,
    InvalidParameterError,
)
from .output import write_csv, write_sidecar

logger = logging.getLogger(__name__)

P = TypeVar("P")
R = TypeVar("R")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

# Exceptions that point at the configuration rather than the numerics.
USAGE_ERRORS: Tuple[Type[BaseException], ...] = (
    ExperimentError,
    InvalidParameterError,
    DimensionError,
    CapacityError,
    ValueError,
)


class ExperimentInput(BaseModel):
    """Input schema shared by all experiments."""
    config: ExperimentConfig
    n_workers: int = Field(1, ge=1, description="Worker threads for points and realization blocks")
    write: bool = Field(True, description="Write the CSV and JSON sidecar")


class ExperimentOutput(BaseModel):
    """Outcome of one experiment run."""
    success: bool = Field(..., description="Whether the experiment completed")
    message: str = Field("", description="Status message or error details")
    data: Optional[Dict[str, Any]] = Field(None, description="Paths and summary of the run")
    error_type: Optional[str] = Field(None, description="Exception class name on failure")
    exit_code: int = Field(EXIT_OK, description="Process exit status for the CLI")


@dataclass
class ExperimentResult:
    """Rows of the CSV, in output order, and the scalars for the sidecar."""
    rows: List[Sequence[float]]
    summary: Dict[str, Any] = field(default_factory=dict)


def exit_code_for(error: BaseException) -> int:
    return EXIT_USAGE if isinstance(error, USAGE_ERRORS) else EXIT_NUMERICAL


class BaseExperiment:
    """Base class for all experiments."""

    name: str = "base_experiment"
    description: str = "Base experiment class"
    version: str = "0.1.0"
    columns: Tuple[str, ...] = ()

    input_schema: Type[ExperimentInput] = ExperimentInput
    output_schema: Type[ExperimentOutput] = ExperimentOutput

    def __init__(self, **kwargs):
        self.options = kwargs
        self.logger = logging.getLogger(f"experiment.{self.name}")

    def validate_input(self, input_data: Dict[str, Any]) -> ExperimentInput:
        """Validate input data against the experiment's input schema."""
        try:
            validated = self.input_schema(**input_data)
        except Exception as e:
            self.logger.error(f"Input validation failed: {str(e)}")
            raise ExperimentError(f"Invalid input: {str(e)}")
        if validated.config.experiment != self.name:
            raise ExperimentError(
                f"config is for '{validated.config.experiment}', not '{self.name}'"
            )
        return validated

    async def execute(self, **kwargs) -> ExperimentOutput:
        """Run the experiment and write its outputs.

        Failures are logged and returned as an unsuccessful output whose
        exit_code separates configuration errors (1) from numerical ones (2).
        """
        try:
            input_data = self.validate_input(kwargs)
            self.logger.info(f"Starting {self.name}")
            result = await self._execute(input_data)

            data: Dict[str, Any] = {"summary": result.summary, "n_rows": len(result.rows)}
            if input_data.write:
                data.update(self._write(input_data.config, result))
            self.logger.info(f"Finished {self.name} ({len(result.rows)} rows)")
            return self.output_schema(
                success=True,
                message="Experiment completed successfully",
                data=data,
            )

        except Exception as e:
            self.logger.error(f"Experiment failed: {str(e)}", exc_info=True)
            return self.output_schema(
                success=False,
                message=f"Experiment failed: {str(e)}",
                data={"error": str(e)},
                error_type=type(e).__name__,
                exit_code=exit_code_for(e),
            )

    async def _execute(self, input_data: ExperimentInput) -> ExperimentResult:
        """Compute the CSV rows and summary; implemented by subclasses."""
        raise NotImplementedError

    def _write(self, config: ExperimentConfig, result: ExperimentResult) -> Dict[str, str]:
        directory = Path(config.output)
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / f"{self.name}.csv"
        sidecar_path = directory / f"{self.name}.json"
        write_csv(csv_path, self.columns, result.rows)
        write_sidecar(sidecar_path, self.name, result.summary, config)
        self.logger.debug(f"Wrote {csv_path} and {sidecar_path}")
        return {"csv": str(csv_path), "sidecar": str(sidecar_path)}

    async def _run_points(self, func: Callable[[P], R], points: Sequence[P],
                          n_workers: int = 1) -> List[R]:
        """Evaluate func on every parameter point off the event loop, results in input order."""
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=max(1, min(n_workers, len(points)))) as pool:
            futures = [loop.run_in_executor(pool, func, point) for point in points]
            return list(await asyncio.gather(*futures))

    def get_schema(self) -> Dict[str, Any]:
        """Describe this experiment and its input/output schemas."""
        return {
            "name": self.name,
            "description": self.description,
            "version": self.version,
            "columns": list(self.columns),
            "input_schema": self.input_schema.model_json_schema(),
            "output_schema": self.output_schema.model_json_schema(),
        }
