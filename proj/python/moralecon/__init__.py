"""Agent-based growth economy with redistribution and consumption thresholds."""

from ._core import (
    AdjustmentSpeed,
    BusinessParams,
    CapitalDrift,
    DomainError,
    EconomyParams,
    FitError,
    GaussSurfaceFit,
    LinearFit,
    ModelConfig,
    MoralParams,
    RedistSchedule,
    RedistTiming,
    RunResult,
    SaddlePoint,
    ScheduleConfig,
    SimulationError,
    SweepConfig,
    SweepRow,
    ValidationError,
    adjustment_speed,
    balance_index,
    baseline_config,
    fit_gauss_surface,
    fit_linear,
    gini,
    initial_saddle,
    joint_business,
    knowledge_rate_for_capital,
    median,
    parse_config,
    parse_config_text,
    read_results_csv,
    redistribute,
    run,
    run_sweep,
    saddle_capital,
    saddle_consumption,
    saddle_for_capital,
    utility_increment,
    write_results_csv,
)

__version__ = "0.1.0"
