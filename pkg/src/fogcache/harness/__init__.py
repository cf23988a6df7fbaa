"""Experiment harness: configuration, runner, sweeps, plots, CLI."""

from .config import ConfigError, ExperimentConfig, emit_config, parse_config
from .plots import render_plots, render_sweep, render_timeseries
from .records import CSV_COLUMNS, MetricRecord
from .runner import (collect_records, converged_delay_stats, read_csv,
                     run_experiment, seed_mean_delay, sweep, write_csv)

__all__ = [
    "CSV_COLUMNS", "ConfigError", "ExperimentConfig", "MetricRecord",
    "collect_records", "converged_delay_stats", "emit_config", "parse_config",
    "read_csv", "render_plots", "render_sweep", "render_timeseries",
    "run_experiment", "seed_mean_delay", "sweep", "write_csv",
]
