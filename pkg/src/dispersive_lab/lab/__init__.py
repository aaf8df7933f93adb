"""Scenario catalog, configuration, file emission and the command line."""

from .config import ExperimentConfig, build_config, load_config
from .scenarios import RunManifest, run_scenario

__all__ = ["ExperimentConfig", "RunManifest", "build_config", "load_config", "run_scenario"]
