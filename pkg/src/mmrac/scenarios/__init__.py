"""Scenario configs, the simulation driver, metrics and exports."""

from .builtins import BUILTINS, METRIC_WINDOWS, builtin
from .config import (
    BoxVertices,
    ControllerSpec,
    Gains,
    ScenarioConfig,
    from_dict,
    load,
    oracle_alpha,
    to_dict,
    validate,
)
from .export import export_csv, read_csv, write_gnuplot, write_metrics
from .metrics import (
    NOT_CONVERGED,
    Comparison,
    MetricsReport,
    compare_levels,
    compute_metrics,
    convergence_time,
)
from .simulate import Trajectory, run_scenario

__all__ = [
    "BUILTINS",
    "METRIC_WINDOWS",
    "NOT_CONVERGED",
    "BoxVertices",
    "Comparison",
    "ControllerSpec",
    "Gains",
    "MetricsReport",
    "ScenarioConfig",
    "Trajectory",
    "builtin",
    "compare_levels",
    "compute_metrics",
    "convergence_time",
    "export_csv",
    "from_dict",
    "load",
    "oracle_alpha",
    "read_csv",
    "run_scenario",
    "to_dict",
    "validate",
    "write_gnuplot",
    "write_metrics",
]
