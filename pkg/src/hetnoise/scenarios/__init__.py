"""Bundled scenarios, their metrics and the scenario runner."""

from .metrics import METRICS, MetricContext, compute_metric
from .runner import RunMode, ScenarioRunError, list_bundled, resolve_scenario, run_scenario, verdict

__all__ = [
    "METRICS",
    "MetricContext",
    "RunMode",
    "ScenarioRunError",
    "compute_metric",
    "list_bundled",
    "resolve_scenario",
    "run_scenario",
    "verdict",
]
