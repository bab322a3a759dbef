"""Experiment orchestration: rate estimation, threshold fits, sweeps, CSV and plots."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import (
    fit_threshold_rows,
    hashing_rows,
    run_cluster_thresholds,
    run_dprime_sweep,
    run_experiment,
    run_percolation,
    run_phase_scan,
    run_small_code_sweep,
    run_subthreshold,
    run_threshold,
)
from .fss import FssFit, fss_fit
from .io import read_csv, write_csv
from .rates import CodeSpec, DecoderSpec, RateEstimate, RunSpec, TrialError, estimate_logical_rate, jackknife_mean

__all__ = [
    "CodeSpec",
    "ConfigError",
    "DecoderSpec",
    "ExperimentConfig",
    "FssFit",
    "RateEstimate",
    "RunSpec",
    "TrialError",
    "estimate_logical_rate",
    "fit_threshold_rows",
    "fss_fit",
    "hashing_rows",
    "jackknife_mean",
    "load_config",
    "parse_config",
    "read_csv",
    "run_cluster_thresholds",
    "run_dprime_sweep",
    "run_experiment",
    "run_percolation",
    "run_phase_scan",
    "run_small_code_sweep",
    "run_subthreshold",
    "run_threshold",
    "write_csv",
]
