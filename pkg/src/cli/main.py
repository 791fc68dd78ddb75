"""
Command Line Interface for the anomalous-decoherence experiments.
"""
import argparse
import asyncio
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

# Add parent directory to path to allow imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from pydantic import ValidationError  # noqa: E402

from anomalous_decoherence.core.config import (  # noqa: E402
    EXPERIMENT_IDS,
    FLAG_PRIORITY,
    ConfigManager,
    ExperimentConfig,
    thread_count,
)
from anomalous_decoherence.core.experiment import EXIT_OK, EXIT_USAGE  # noqa: E402
from anomalous_decoherence.core.runner import ExperimentRunner  # noqa: E402
from anomalous_decoherence.experiments import EXPERIMENTS, create_experiments  # noqa: E402

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# flag destination -> ExperimentConfig field
FLAG_FIELDS = {
    "gamma1": "gamma1",
    "temps": "temperatures",
    "eps": "epsilons",
    "potential": "potential",
    "gamma_b": "gamma_b",
    "ttilde": "t_tildes",
    "delta": "delta",
    "n": "n_realizations",
    "dt": "dt",
    "t_max": "t_max",
    "record_every": "record_every",
    "time_average": "time_average",
    "omega_min": "omega_min",
    "omega_max": "omega_max",
    "omega_step": "omega_step",
    "quantum_dt": "quantum_dt",
    "quantum_t_max": "quantum_t_max",
    "n_records": "n_records",
    "seed": "master_seed",
    "output": "output",
    "max_bytes": "max_ensemble_bytes",
}


class UsageErrorParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def float_list(text: str) -> List[float]:
    """Parse a comma-separated list of floats; an empty string gives []."""
    items = [item.strip() for item in text.split(",") if item.strip()]
    try:
        return [float(item) for item in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    physics = common.add_argument_group("model parameters")
    physics.add_argument("--gamma1", type=float, help="Rescaled dissipation of the classical bath")
    physics.add_argument("--temps", type=float_list, help="Comma-separated temperatures")
    physics.add_argument("--eps", type=float_list, help="Comma-separated probe couplings")
    physics.add_argument("--potential", choices=["double_well", "harmonic"],
                         help="Classical bath potential")
    physics.add_argument("--gamma-b", dest="gamma_b", type=float, help="Spin-boson decay coefficient")
    physics.add_argument("--ttilde", type=float_list, help="Comma-separated rescaled temperatures T/Delta")
    physics.add_argument("--delta", type=float, help="Spin-boson tunneling frequency")

    numerics = common.add_argument_group("numerical controls")
    numerics.add_argument("--n", type=int, help="Number of realizations")
    numerics.add_argument("--dt", type=float, help="Langevin time step")
    numerics.add_argument("--t-max", dest="t_max", type=float, help="Classical simulation time")
    numerics.add_argument("--record-every", dest="record_every", type=int,
                          help="Steps between recorded samples")
    numerics.add_argument("--time-average", dest="time_average", action="store_const", const=True,
                          help="Average the autocorrelation over reference times")
    numerics.add_argument("--omega-min", dest="omega_min", type=float, help="Lowest frequency")
    numerics.add_argument("--omega-max", dest="omega_max", type=float, help="Highest frequency")
    numerics.add_argument("--omega-step", dest="omega_step", type=float, help="Frequency spacing")
    numerics.add_argument("--quantum-dt", dest="quantum_dt", type=float, help="Master-equation time step")
    numerics.add_argument("--quantum-t-max", dest="quantum_t_max", type=float,
                          help="Master-equation integration time (default 3/Gamma_d)")
    numerics.add_argument("--n-records", dest="n_records", type=int, help="Recorded quantum time points")
    numerics.add_argument("--max-bytes", dest="max_bytes", type=int, help="Ensemble memory budget")

    run = common.add_argument_group("run")
    run.add_argument("--seed", type=int, help="Master random seed")
    run.add_argument("--output", help="Output directory")
    run.add_argument("--config", help="JSON or YAML config file (a previous run's sidecar works)")
    run.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    parser = UsageErrorParser(description="Anomalous decoherence experiments")
    subparsers = parser.add_subparsers(dest="command", help="Available commands",
                                       parser_class=UsageErrorParser)
    for name in EXPERIMENT_IDS:
        subparsers.add_parser(name, parents=[common], help=EXPERIMENTS[name].description)
    subparsers.add_parser("list", help="List available experiments")
    return parser


def flag_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Config values given explicitly on the command line."""
    overrides: Dict[str, Any] = {"experiment": args.command}
    for dest, field_name in FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[field_name] = value
    return overrides


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """defaults < --config file < flags."""
    manager = ConfigManager()
    if args.config:
        manager.load_from_file(args.config)
    manager.add_source("flags", flag_overrides(args), priority=FLAG_PRIORITY, source_type="cli")
    return manager.resolve()


async def run(args: argparse.Namespace) -> int:
    try:
        config = resolve_config(args)
        n_workers = config.threads or thread_count() or os.cpu_count() or 1
    except (ValidationError, ValueError, FileNotFoundError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE

    runner = ExperimentRunner(create_experiments(), n_workers=n_workers)
    logger.info(f"Running {config.experiment} with {n_workers} worker thread(s)")
    result = await runner.run(config)
    if not result.success:
        print(f"Error: {result.message}", file=sys.stderr)
        return result.exit_code

    data = result.data or {}
    print(f"{config.experiment}: {data.get('n_rows', 0)} rows")
    for key in ("csv", "sidecar"):
        if key in data:
            print(f"  {key}: {data[key]}")
    return EXIT_OK


def list_experiments() -> int:
    runner = ExperimentRunner(create_experiments())
    for entry in runner.list_experiments():
        print(f"{entry['name']:<22} {entry['description']}")
        print(f"{'':<22} columns: {', '.join(entry['columns'])}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the CLI; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    logging.captureWarnings(True)

    if args.command == "list":
        return list_experiments()
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    return asyncio.run(run(args))


if __name__ == "__main__":
    sys.exit(main())
