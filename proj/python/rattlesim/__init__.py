"""Stochastic rate-induced tipping simulator."""

from ._rattlesim import (
    ConfigError,
    EnsembleResult,
    Error,
    ExitTimeDistribution,
    ExperimentConfig,
    InconclusiveError,
    InvalidArgument,
    ParamSchedule,
    PotentialModel,
    RescaleReport,
    RollingStatSeries,
    SamplePath,
    SimConfig,
    exit_time_distribution,
    exit_times,
    kendall_tau_b,
    ks_threshold,
    load_config,
    models,
    rolling_autocorrelation,
    rolling_variance,
    run_ensemble,
    run_figure1,
    run_figure2,
    run_simulate,
    run_verify_timechange,
    simulate_path,
    split_seed,
    survivor_mean_series,
    validate_model,
    verify_time_change,
)

__all__ = [name for name in dir() if not name.startswith("_")]
