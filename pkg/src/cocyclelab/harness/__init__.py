"""Experiment harness: configs, catalog, CLI, deterministic emission."""

from .config import ConfigError, build_params, load_config, resolve
from .experiments import EXPERIMENTS, catalog, run_experiment
from .io import RunContext, finish_manifest

