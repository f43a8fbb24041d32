"""Scenario execution: metrics, expectations, verdict and artifacts."""

import logging
from dataclasses import replace
from enum import Enum
from pathlib import Path
from typing import Optional

from ..config import (
    ANALYTIC_METRICS,
    METRIC_NAMES,
    MONTE_CARLO_METRICS,
    Scenario,
    ScenarioParseError,
)
from ..models import ExpectationResult, PulseKind, RunReport
from ..noise.analytic import floor_difference_db
from ..persistence.artifact_store import ArtifactStore, ArtifactStoreError
from ..reporting.file_sink import FileSink
from .metrics import MAIN, MetricContext, compute_metric

logger = logging.getLogger(__name__)

BUNDLED_DIR = Path(__file__).parent / "bundled"

# Cheap closed-form metrics reported by every run.
BASE_METRICS = (
    "analytic_floor_db",
    "floor_difference_db",
    "predicted_imageband_difference_db",
)
SIMULATION_METRICS = (
    "mc_floor_db",
    "mc_floor_flatness_db",
    "mc_variance_ratio",
    "mc_variance_zscore",
)

CONSISTENT = "consistent with measured data"
FALSIFIED = "falsified by measured data"


class ScenarioRunError(Exception):
    """Raised when a scenario fails to execute; names the scenario."""


class RunMode(Enum):
    """Which pipelines a run executes."""

    FULL = "full"
    ANALYTIC = "analytic"
    SIMULATE = "simulate"


def list_bundled() -> list[str]:
    """Names of the scenarios shipped with the package."""
    return sorted(p.stem for p in BUNDLED_DIR.glob("*.yaml"))


def resolve_scenario(reference: str) -> Path:
    """
    Find a scenario by file path or bundled name.

    Raises:
        ScenarioParseError: If neither a file nor a bundled scenario matches
    """
    path = Path(reference)
    if path.is_file():
        return path
    bundled = BUNDLED_DIR / f"{reference}.yaml"
    if bundled.is_file():
        return bundled
    raise ScenarioParseError(
        f"no scenario file or bundled scenario named {reference!r}; "
        f"bundled scenarios are {', '.join(list_bundled())}"
    )


def _metrics_for(scenario: Scenario, mode: RunMode) -> list[str]:
    referenced = {e.metric for e in scenario.expectations}
    if mode is RunMode.SIMULATE:
        wanted = set(SIMULATION_METRICS) | (referenced & set(MONTE_CARLO_METRICS))
    elif mode is RunMode.ANALYTIC:
        wanted = set(ANALYTIC_METRICS)
        if scenario.detectors()[0].pulse.kind is PulseKind.DELTA:
            wanted.discard("shot_variance_a2")
    else:
        wanted = set(BASE_METRICS) | referenced
    return [name for name in METRIC_NAMES if name in wanted]


def verdict(scenario: Scenario) -> Optional[str]:
    """Judge the scenario's noise model against the measured floor difference, if given."""
    measured = scenario.reference.measured_het_hom_difference_db
    if measured is None:
        return None
    predicted = floor_difference_db(scenario.noise_model, scenario.optical_path())
    within = abs(predicted - measured) <= scenario.reference.resolution_db
    outcome = CONSISTENT if within else FALSIFIED
    return (
        f"{scenario.noise_model.display_name} model {outcome} "
        f"(predicted {predicted:.2f} dB, measured {measured:.2f} dB)"
    )


def run_scenario(
    scenario: Scenario, out_dir: Optional[Path] = None, mode: RunMode = RunMode.FULL
) -> RunReport:
    """
    Execute a scenario.

    Args:
        scenario: Validated scenario
        out_dir: Artifact directory; nothing is written when None
        mode: Pipelines to run; ANALYTIC and SIMULATE evaluate only the
            expectations their metrics cover

    Returns:
        Report with every computed metric and evaluated expectation

    Raises:
        ScenarioRunError: If any pipeline or artifact write fails
    """
    logger.info(
        "Running scenario %s (%s model, seed %d, %d trial(s), %s)",
        scenario.name,
        scenario.noise_model.value,
        scenario.simulation.master_seed,
        scenario.simulation.trials,
        mode.value,
    )
    try:
        ctx = MetricContext(scenario)
        names = _metrics_for(scenario, mode)
        metrics = {name: compute_metric(ctx, name) for name in names}
    except (ValueError, KeyError) as e:
        raise ScenarioRunError(f"scenario {scenario.name}: {e}") from e

    expectations = scenario.expectations
    if mode is not RunMode.FULL:
        skipped = [e for e in expectations if e.metric not in metrics]
        if skipped:
            logger.info(
                "Skipping %d expectation(s) not covered by a %s run", len(skipped), mode.value
            )
        expectations = tuple(e for e in expectations if e.metric in metrics)
    results = tuple(ExpectationResult(e, metrics[e.metric]) for e in expectations)
    ran_trials = any(name in MONTE_CARLO_METRICS for name in metrics)

    report = RunReport(
        scenario_name=scenario.name,
        master_seed=scenario.simulation.master_seed,
        trials=ctx.sim.trials if ran_trials else scenario.simulation.trials,
        noise_model=scenario.noise_model,
        metrics=metrics,
        results=results,
        verdict=verdict(scenario),
    )

    if out_dir is not None:
        report = _write_artifacts(ctx, report, out_dir)

    logger.info(
        "Scenario %s finished: %d of %d expectation(s) met",
        scenario.name,
        len(results) - len(report.failures),
        len(results),
    )
    return report


def _write_artifacts(ctx: MetricContext, report: RunReport, out_dir: Path) -> RunReport:
    scenario = ctx.scenario
    store = ArtifactStore(out_dir)
    header = {
        "scenario": scenario.name,
        "noise_model": scenario.noise_model.value,
        "master_seed": scenario.simulation.master_seed,
        "trials": scenario.simulation.trials,
        "het_frequency_hz": repr(ctx.setup.beat.het_frequency_hz),
        "lo_photon_rate": repr(ctx.setup.lo.photon_rate),
    }
    paths: list[Path] = []
    try:
        head = ctx.main_trace_head
        if head is not None:
            paths.append(store.write_trace(scenario.name, head, header))
        for variant, spectrum in ctx.computed_analytic_spectra.items():
            label = "analytic" if variant == MAIN else f"analytic_{variant}"
            paths.append(store.write_spectrum(scenario.name, label, spectrum, header))
        for variant, spectrum in ctx.computed_mc_spectra.items():
            paths.append(store.write_spectrum(scenario.name, variant, spectrum, header))
        scan = ctx.computed_scan
        if scan is not None:
            paths.append(store.write_scan(scenario.name, scan, header))
    except ArtifactStoreError as e:
        raise ScenarioRunError(f"scenario {scenario.name}: {e}") from e

    report = replace(report, artifacts=tuple(paths))
    if not FileSink(store).send(report):
        raise ScenarioRunError(f"scenario {scenario.name}: report could not be written")
    return report
