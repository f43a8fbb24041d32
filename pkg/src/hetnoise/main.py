"""Command-line entry point for scenario runs and artifact analysis."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from .config import (
    ConfigurationError,
    ScenarioParseError,
    ScenarioValidationError,
    configure_logging,
    load_scenario,
    resolve_out_dir,
)
from .models import SpectrumConfig
from .persistence.artifact_store import ArtifactStore, ArtifactStoreError, read_scan, read_trace
from .reporting.base import ReportFormat
from .reporting.console_sink import ConsoleSink
from .scenarios.runner import (
    BUNDLED_DIR,
    RunMode,
    ScenarioRunError,
    list_bundled,
    resolve_scenario,
    run_scenario,
)
from .spectral.fringe import FringeAnalysisError, fringe_visibility
from .spectral.psd import SpectrumRangeError, estimate_psd, floor_flatness, noise_floor
from .utils.colors import get_formatter, set_color_mode

logger = logging.getLogger(__name__)

# Exit codes
EXIT_SUCCESS = 0
EXIT_EXPECTATION_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_VALIDATION_ERROR = 3
EXIT_RUNTIME_ERROR = 4


def _run(parsed: argparse.Namespace, mode: RunMode) -> int:
    scenario = load_scenario(resolve_scenario(parsed.scenario))
    scenario = scenario.with_overrides(master_seed=parsed.seed, trials=parsed.trials)
    out_dir = resolve_out_dir(parsed.out_dir, scenario)

    report = run_scenario(scenario, out_dir, mode)
    if not ConsoleSink(ReportFormat(parsed.format)).send(report):
        return EXIT_RUNTIME_ERROR
    return EXIT_SUCCESS if report.all_passed else EXIT_EXPECTATION_FAILED


def _print_metrics(source: str, metrics: dict[str, float], fmt: ReportFormat) -> None:
    if fmt is ReportFormat.COLUMNAR:
        lines = [f"# source: {source}", "kind\tname\tvalue"]
        lines.extend(f"metric\t{name}\t{value!r}" for name, value in metrics.items())
    else:
        formatter = get_formatter()
        width = max(len(name) for name in metrics)
        lines = [formatter.header(f"=== {source} ===")]
        lines.extend(
            f"  {formatter.metric_name(name.ljust(width))}  {value: .6g}"
            for name, value in metrics.items()
        )
    print("\n".join(lines))


def _artifact_name(path: Path, suffix: str) -> str:
    stem = path.stem
    return stem[: -len(suffix)] if stem.endswith(suffix) else stem


def cmd_spectrum(parsed: argparse.Namespace) -> int:
    """Welch spectrum of the J- column of a trace file."""
    trace = read_trace(parsed.trace)
    if parsed.span_mhz:
        span = (parsed.span_mhz[0] * 1e6, parsed.span_mhz[1] * 1e6)
    else:
        span = (0.0, trace.sample_rate / 2.0)
    try:
        cfg = SpectrumConfig(rbw=parsed.rbw_khz * 1e3, span=span)
    except ValueError as e:
        raise ScenarioValidationError(f"spectrum: {e}") from e

    spectrum = estimate_psd(trace.j_minus, trace.sample_rate, cfg)
    name = _artifact_name(parsed.trace, "_trace")
    store = ArtifactStore(resolve_out_dir(parsed.out_dir))
    store.write_spectrum(
        name, "measured", spectrum, {"source": parsed.trace, "master_seed": trace.seed_used}
    )
    _print_metrics(
        str(parsed.trace),
        {
            "floor_db": noise_floor(spectrum),
            "floor_flatness_db": floor_flatness(spectrum),
            "rbw_hz": spectrum.rbw,
        },
        ReportFormat(parsed.format),
    )
    return EXIT_SUCCESS


def cmd_fringe(parsed: argparse.Namespace) -> int:
    """Fitted visibility of every detector column of a scan file."""
    scan = read_scan(parsed.scan)
    visibilities = fringe_visibility(scan)
    metrics = {f"visibility_{k}": v for k, v in enumerate(visibilities, start=1)}
    _print_metrics(str(parsed.scan), metrics, ReportFormat(parsed.format))
    return EXIT_SUCCESS


def cmd_list(parsed: argparse.Namespace) -> int:
    """Print the bundled scenario names with their descriptions."""
    formatter = get_formatter()
    for name in list_bundled():
        description = load_scenario(BUNDLED_DIR / f"{name}.yaml").description
        print(f"{formatter.metric_name(name)}\n    {description}")
    return EXIT_SUCCESS


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Override the scenario's master seed")
    common.add_argument(
        "--trials", type=int, help="Override the Monte Carlo trial count (0: closed form only)"
    )
    common.add_argument(
        "--out-dir",
        help="Artifact directory (default: $HETNOISE_OUT_DIR, then the scenario's out_dir, "
        "then ./out)",
    )
    common.add_argument(
        "--format",
        choices=[f.value for f in ReportFormat],
        default=ReportFormat.TEXT.value,
        help="Report layout on stdout",
    )
    common.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Enable verbose logging (DEBUG level)",
    )
    common.add_argument(
        "--no-color",
        action="store_true",
        help="Disable colored output",
    )

    parser = argparse.ArgumentParser(
        prog="hetnoise",
        description="Quantum-noise floors of balanced heterodyne and homodyne detection",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exit codes:
  0  Success - every expectation met
  1  Expectation failure - at least one metric outside its tolerance
  2  Parse error - unreadable scenario file or bad command line
  3  Validation error - missing, unknown or out-of-range scenario field
  4  Runtime error - simulation, analysis or file I/O failed

Examples:
  %(prog)s scenario list
  %(prog)s scenario run het_vs_hom_coherence --seed 7
  %(prog)s analytic imageband_prediction --format columnar
  %(prog)s spectrum out/lo_doubling_trace.tsv --rbw-khz 100 --span-mhz 0.5 10
        """,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    analytic = commands.add_parser(
        "analytic", parents=[common], help="Closed-form metrics of a scenario"
    )
    analytic.add_argument("scenario", help="Scenario file or bundled scenario name")
    analytic.set_defaults(handler=lambda p: _run(p, RunMode.ANALYTIC))

    simulate = commands.add_parser(
        "simulate", parents=[common], help="Monte Carlo traces and spectra of a scenario"
    )
    simulate.add_argument("scenario", help="Scenario file or bundled scenario name")
    simulate.set_defaults(handler=lambda p: _run(p, RunMode.SIMULATE))

    spectrum = commands.add_parser(
        "spectrum", parents=[common], help="Noise spectrum of a trace file"
    )
    spectrum.add_argument("trace", type=Path, help="Trace file written by simulate")
    spectrum.add_argument("--rbw-khz", type=float, default=100.0, help="Resolution bandwidth")
    spectrum.add_argument(
        "--span-mhz", type=float, nargs=2, metavar=("START", "STOP"), help="Analysis span"
    )
    spectrum.set_defaults(handler=cmd_spectrum)

    fringe = commands.add_parser("fringe", parents=[common], help="Visibility of a fringe scan")
    fringe.add_argument("scan", type=Path, help="Scan file: axis column, one column per detector")
    fringe.set_defaults(handler=cmd_fringe)

    scenario = commands.add_parser("scenario", help="Run or list scenarios")
    scenario_commands = scenario.add_subparsers(dest="scenario_command", required=True)
    run = scenario_commands.add_parser(
        "run", parents=[common], help="Run a scenario and check its expectations"
    )
    run.add_argument("scenario", help="Scenario file or bundled scenario name")
    run.set_defaults(handler=lambda p: _run(p, RunMode.FULL))
    listing = scenario_commands.add_parser(
        "list", parents=[common], help="List bundled scenarios"
    )
    listing.set_defaults(handler=cmd_list)

    return parser


def main(args: Optional[list[str]] = None) -> int:
    """
    Main entry point.

    Args:
        args: Command line arguments (defaults to sys.argv)

    Returns:
        Exit code
    """
    parser = build_parser()
    try:
        parsed = parser.parse_args(args)
    except SystemExit as e:
        return EXIT_SUCCESS if e.code == 0 else EXIT_PARSE_ERROR

    force_color = False if parsed.no_color else None
    set_color_mode(force_color=force_color)
    configure_logging("DEBUG" if parsed.verbose else "INFO", force_color)

    try:
        return int(parsed.handler(parsed))
    except ScenarioParseError as e:
        logger.error("Parse error: %s", e)
        return EXIT_PARSE_ERROR
    except ConfigurationError as e:
        logger.error("Validation error: %s", e)
        return EXIT_VALIDATION_ERROR
    except (
        ScenarioRunError,
        ArtifactStoreError,
        SpectrumRangeError,
        FringeAnalysisError,
    ) as e:
        logger.error("Run failed: %s", e)
        return EXIT_RUNTIME_ERROR
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_RUNTIME_ERROR
    except Exception as e:
        logger.exception("Unexpected error: %s", e)
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
