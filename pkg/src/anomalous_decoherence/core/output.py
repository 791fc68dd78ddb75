"""
CSV and JSON sidecar writers.

Floats are written with 17 significant digits so that a re-run from the
embedded config reproduces the files byte for byte.
"""
import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence, Union

import numpy as np

from .config import ExperimentConfig

PathLike = Union[str, Path]


def format_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17e}"


def write_csv(path: PathLike, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write a header row and one formatted row per record."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row has {len(row)} values, expected {len(columns)}")
            writer.writerow([format_value(v) for v in row])


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars and arrays to plain Python; NaN and inf become None."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_sidecar(path: PathLike, experiment: str, summary: Dict[str, Any],
                  config: ExperimentConfig) -> None:
    payload = {
        "experiment": experiment,
        "summary": to_jsonable(summary),
        "config": config.model_dump(mode="json"),
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
