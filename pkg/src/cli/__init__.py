"""
Command Line Interface for the anomalous-decoherence experiments.

Each experiment is a subcommand; configuration comes from defaults, an
optional --config file and flags, in increasing priority.
"""

from .main import build_parser, main

__all__ = ['build_parser', 'main']
