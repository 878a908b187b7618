"""Batch experiments, result files and the command line interface."""

from .config import ExperimentSpec, load_config
from .experiments import run_experiment, run_fig1, run_fig2, run_single
from .results import emit_results, read_results
from .validation import run_validation_suite

__all__ = [
    "ExperimentSpec",
    "emit_results",
    "load_config",
    "read_results",
    "run_experiment",
    "run_fig1",
    "run_fig2",
    "run_single",
    "run_validation_suite",
]
