from .families import FAMILIES, ExperimentSpec, default_spec, uniform_recovery_check
from .runner import ResultRow, run_experiment, write_csv, read_csv
from .slopes import SlopeReport, fit_slopes, check_rows

__all__ = [
    "FAMILIES",
    "ExperimentSpec",
    "default_spec",
    "uniform_recovery_check",
    "ResultRow",
    "run_experiment",
    "write_csv",
    "read_csv",
    "SlopeReport",
    "fit_slopes",
    "check_rows",
]
