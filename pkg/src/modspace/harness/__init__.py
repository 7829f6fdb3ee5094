"""Experiment harness, report writing and the command-line interface."""

from .config import ConfigError, ExperimentConfig, build, load
from .experiments import CATALOG, Report, run

__all__ = ["CATALOG", "ConfigError", "ExperimentConfig", "Report", "build", "load", "run", "list_experiments"]


def list_experiments() -> dict[str, str]:
    return dict(CATALOG)
