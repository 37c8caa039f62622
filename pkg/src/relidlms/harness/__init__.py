"""Experiment orchestration: configuration, paired Monte-Carlo runs, CSV export, CLI."""

from .config import ExperimentConfig, parse_config, preset
from .export import export_artifacts, export_sweep
from .runner import RunArtifacts, run_experiment, run_monte_carlo, run_sweep

__all__ = [
    "ExperimentConfig",
    "RunArtifacts",
    "export_artifacts",
    "export_sweep",
    "parse_config",
    "preset",
    "run_experiment",
    "run_monte_carlo",
    "run_sweep",
]
