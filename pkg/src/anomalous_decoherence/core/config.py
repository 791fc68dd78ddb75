"""
Experiment configuration for the anomalous-decoherence simulations.
Handles loading, merging, and validating configuration from defaults, files and flags.
"""
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import yaml
from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator
from typing_extensions import Literal

ExperimentId = Literal[
    "classical-spectrum",
    "izero-scan",
    "classical-coherence",
    "spinboson-coherence",
    "spinboson-spectrum",
]

EXPERIMENT_IDS: List[str] = [
    "classical-spectrum",
    "izero-scan",
    "classical-coherence",
    "spinboson-coherence",
    "spinboson-spectrum",
]

THREADS_ENV_VAR = "ANODEC_THREADS"

DEFAULT_PRIORITY = 0
FILE_PRIORITY = 10
FLAG_PRIORITY = 20


class ExperimentConfig(BaseModel):
    """Fully resolved, serializable configuration of one experiment run."""

    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentId
    # classical bath
    temperatures: List[float] = Field(default_factory=lambda: [0.25, 0.5, 1.0, 2.0])
    gamma1: float = Field(0.4, gt=0, description="Rescaled dissipation")
    epsilons: List[float] = Field(default_factory=lambda: [0.05])
    potential: Literal["double_well", "harmonic"] = "double_well"
    # spin-boson bath
    gamma_b: float = Field(1.0, gt=0, description="Bath decay coefficient")
    t_tildes: List[float] = Field(default_factory=lambda: [0.5, 2.0, 80.0])
    delta: float = Field(20.0, gt=0, description="Tunneling frequency")
    # numerical controls
    n_realizations: int = Field(5000, ge=2)
    dt: float = Field(0.01, gt=0)
    t_max: float = Field(200.0, gt=0)
    record_every: int = Field(10, ge=1)
    time_average: bool = False
    omega_min: Optional[float] = None
    omega_max: Optional[float] = None
    omega_step: Optional[float] = Field(None, gt=0)
    quantum_dt: Optional[float] = Field(None, gt=0)
    quantum_t_max: Optional[float] = Field(None, gt=0)
    n_records: int = Field(2000, ge=2)
    master_seed: int = Field(42, ge=0, lt=2**64)
    output: str = "results"
    max_ensemble_bytes: int = Field(2 * 1024**3, gt=0)
    threads: Optional[int] = Field(None, ge=1, description="Worker threads; never changes output")

    @field_validator("temperatures", "epsilons", "t_tildes")
    @classmethod
    def _non_empty_non_negative(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("parameter list must not be empty")
        if any(v < 0 for v in value):
            raise ValueError("parameter list entries must be non-negative")
        return value

    @field_validator("omega_max")
    @classmethod
    def _ordered_grid(cls, value: Optional[float], info: ValidationInfo) -> Optional[float]:
        low = info.data.get("omega_min")
        if value is not None and low is not None and value <= low:
            raise ValueError("omega_max must exceed omega_min")
        return value

    def omega_grid(self, default_min: float, default_max: float,
                   default_step: float) -> np.ndarray:
        """Frequency grid, with experiment-specific defaults for unset bounds."""
        low = default_min if self.omega_min is None else self.omega_min
        high = default_max if self.omega_max is None else self.omega_max
        step = default_step if self.omega_step is None else self.omega_step
        count = int(round((high - low) / step)) + 1
        return np.linspace(low, high, count)


class ConfigSource(BaseModel):
    """Represents a single source of configuration."""
    name: str
    content: Dict[str, Any]
    priority: int = 0
    source_type: str = "unknown"
    metadata: Dict[str, Any] = Field(default_factory=dict)


class ConfigManager:
    """Merges configuration sources by priority into an ExperimentConfig."""

    def __init__(self):
        self.sources: List[ConfigSource] = []
        self.config: Dict[str, Any] = {}

    def add_source(self, name: str, content: Dict[str, Any],
                   priority: int = DEFAULT_PRIORITY, source_type: str = "unknown",
                   metadata: Optional[Dict[str, Any]] = None) -> None:
        """Add a new configuration source.

        Args:
            name: Unique identifier for the source
            content: Dictionary of configuration values
            priority: Higher priority sources override lower ones
            source_type: Type/category of the source
            metadata: Additional metadata about the source
        """
        if metadata is None:
            metadata = {}

        self.sources.append(
            ConfigSource(
                name=name,
                content=content,
                priority=priority,
                source_type=source_type,
                metadata=metadata
            )
        )
        self.config = {}

    def load_from_file(self, file_path: str, priority: int = FILE_PRIORITY) -> None:
        """Load configuration from a JSON or YAML file.

        A JSON sidecar written by a previous run is accepted; its embedded
        ``config`` block is used.
        """
        path = Path(file_path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {file_path}")

        try:
            if path.suffix.lower() in ('.json',):
                with open(path, 'r', encoding="utf-8") as f:
                    content = json.load(f)
            elif path.suffix.lower() in ('.yaml', '.yml'):
                with open(path, 'r', encoding="utf-8") as f:
                    content = yaml.safe_load(f) or {}
            else:
                raise ValueError(f"Unsupported file format: {path.suffix}")
        except (OSError, json.JSONDecodeError, yaml.YAMLError) as e:
            raise ValueError(f"Failed to load config from {file_path}: {str(e)}")

        if not isinstance(content, dict):
            raise ValueError(f"Config file {file_path} must contain a mapping")
        if isinstance(content.get("config"), dict):
            content = content["config"]

        self.add_source(
            name=path.name,
            content=content,
            priority=priority,
            source_type="file",
            metadata={"path": str(path.absolute())}
        )

    def merge(self) -> Dict[str, Any]:
        """Merge all sources into a single dictionary.

        Sources are applied in ascending priority so higher priority wins.
        """
        merged: Dict[str, Any] = {}
        for source in sorted(self.sources, key=lambda x: x.priority):
            self._deep_merge(merged, source.content)
        self.config = merged
        return merged

    def _deep_merge(self, target: Dict[str, Any], source: Dict[str, Any]) -> None:
        """Recursively merge source dictionary into target."""
        for key, value in source.items():
            if (key in target and
                    isinstance(target[key], dict) and
                    isinstance(value, dict)):
                self._deep_merge(target[key], value)
            else:
                target[key] = value

    def get(self, key: Optional[str] = None, default: Any = None) -> Any:
        """Get a merged value by dot-notation key."""
        if not self.config:
            self.merge()

        if key is None:
            return self.config

        value: Any = self.config
        try:
            for k in key.split('.'):
                value = value[k]
            return value
        except (KeyError, TypeError):
            return default

    def resolve(self) -> ExperimentConfig:
        """Validate the merged configuration.

        Raises:
            pydantic.ValidationError: if the merged values are not a valid config
        """
        return ExperimentConfig(**self.merge())


def thread_count(env_file: Optional[str] = None) -> Optional[int]:
    """Worker-thread count from the environment.

    A ``.env`` file is read from env_file, or else looked up from the
    working directory upwards.
    """
    path = env_file or find_dotenv(usecwd=True)
    if path:
        load_dotenv(path)
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or not raw.strip():
        return None
    try:
        count = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}")
    if count < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be at least 1, got {count}")
    return count


__all__ = [
    "ConfigManager",
    "ConfigSource",
    "ExperimentConfig",
    "ExperimentId",
    "EXPERIMENT_IDS",
    "thread_count",
]
