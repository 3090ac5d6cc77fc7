from batchbandit.harness.config import ExperimentConfig, config_from_dict, load_config
from batchbandit.harness.fitting import Log2Fit, fit_log2_curve
from batchbandit.harness.output import read_trace, trace_csv, write_outputs
from batchbandit.harness.runner import (
    ExperimentResult,
    RegretTrace,
    TrialResult,
    aggregate,
    experiment_summary,
    log_checkpoints,
    run_experiment,
    run_trial,
    simulate,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "Log2Fit",
    "RegretTrace",
    "TrialResult",
    "aggregate",
    "config_from_dict",
    "experiment_summary",
    "fit_log2_curve",
    "load_config",
    "log_checkpoints",
    "read_trace",
    "run_experiment",
    "run_trial",
    "simulate",
    "trace_csv",
    "write_outputs",
]
