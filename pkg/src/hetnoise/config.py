"""Scenario files: schema, loading, validation and serialization."""

import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

import yaml
from scipy import constants

from .models import (
    TWO_PI,
    BeatConfig,
    DetectorModel,
    DetectorPair,
    Expectation,
    FieldSpec,
    NoiseModel,
    OpticalPath,
    PulseKind,
    PulseShape,
    SimConfig,
    SpectrumConfig,
)
from .optics.fields import field_from_power
from .simulation.trials import BalancedSetup

logger = logging.getLogger(__name__)

ENV_OUT_DIR = "HETNOISE_OUT_DIR"
DEFAULT_OUT_DIR = Path("./out")

REQUIRED_FIELDS = ("name", "local_oscillator.power_mw")

ANALYTIC_METRICS = (
    "shot_variance_a2",
    "analytic_floor_db",
    "analytic_het_hom_difference_db",
    "analytic_lo_doubling_db",
    "predicted_imageband_difference_db",
    "floor_difference_db",
)
MONTE_CARLO_METRICS = (
    "mc_floor_db",
    "mc_het_hom_difference_db",
    "mc_lo_doubling_db",
    "mc_floor_flatness_db",
    "mc_variance_ratio",
    "mc_variance_zscore",
    "mc_fano_factor",
)
FRINGE_METRICS = ("visibility_1", "visibility_2", "visibility_error")
METRIC_NAMES = ANALYTIC_METRICS + MONTE_CARLO_METRICS + FRINGE_METRICS

Intervals = tuple[tuple[float, float], ...]


class ConfigurationError(Exception):
    """Raised when a scenario cannot be loaded."""


class ScenarioParseError(ConfigurationError):
    """Raised when a scenario file is not readable structured text."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class ScenarioValidationError(ConfigurationError):
    """Raised when a scenario parses but names missing, unknown or invalid values."""


@dataclass(frozen=True)
class SignalSection:
    """Weak signal field; it shares the local oscillator's wavelength."""

    power_pw: float = 20.0
    phase_rad: float = 0.0


@dataclass(frozen=True)
class LocalOscillatorSection:
    power_mw: float
    wavelength_nm: float = 1064.0
    phase_rad: float = 0.0


@dataclass(frozen=True)
class BeatSection:
    """Net frequency offset of the signal from the LO; 0 is homodyne."""

    het_frequency_mhz: float = 3.0
    relative_phase_rad: float = 0.0


@dataclass(frozen=True)
class PathSection:
    collection_efficiency: float = 1.0
    visibility_1: float = 1.0
    visibility_2: float = 1.0


@dataclass(frozen=True)
class DetectorSection:
    """Both photodiodes of the balanced pair share these settings."""

    efficiency: float = 1.0
    pulse: str = PulseKind.RECTANGULAR.value
    pulse_area_e: float = 1.0
    pulse_width_ns: float = 10.0
    electronics_psd_a2_per_hz: float = 0.0
    dark_rate_hz: float = 0.0


@dataclass(frozen=True)
class NoiseSection:
    model: str = NoiseModel.COHERENCE.value


@dataclass(frozen=True)
class SimulationSection:
    """Monte Carlo settings; trials = 0 runs the closed-form pipeline only."""

    sample_rate_mhz: float = 100.0
    duration_ms: float = 10.48576
    master_seed: int = 0
    trials: int = 0
    workers: int = 1
    lo_linewidth_hz: float = 0.0
    trace_export_samples: int = 4096
    fano_window_samples: int = 64


@dataclass(frozen=True)
class SpectrumSection:
    rbw_khz: float = 100.0
    span_start_mhz: float = 0.5
    span_stop_mhz: float = 10.0
    averaging: int = 0
    db_reference_a2: float = 1.0
    exclude_mhz: Intervals = ()
    tone_guard_khz: float = 500.0
    invalid_floor_a2_per_hz: Optional[float] = None


@dataclass(frozen=True)
class FringeSection:
    """Visibility scan derived from the configured fields."""

    periods: float = 5.0
    samples: int = 4000
    noise_fraction: float = 0.0


@dataclass(frozen=True)
class ReferenceSection:
    """Measured heterodyne-minus-homodyne floor difference the noise model is judged by."""

    measured_het_hom_difference_db: Optional[float] = None
    resolution_db: float = 0.5


SECTIONS: dict[str, type] = {
    "signal": SignalSection,
    "local_oscillator": LocalOscillatorSection,
    "beat": BeatSection,
    "path": PathSection,
    "detector": DetectorSection,
    "noise": NoiseSection,
    "simulation": SimulationSection,
    "spectrum": SpectrumSection,
    "fringe": FringeSection,
    "reference": ReferenceSection,
}
_TOP_LEVEL_KEYS = ("name", "description", "out_dir", *SECTIONS, "expectations")


@dataclass(frozen=True)
class Scenario:
    """A complete, validated experiment description in the units of the file."""

    name: str
    local_oscillator: LocalOscillatorSection
    description: str = ""
    out_dir: Optional[str] = None
    signal: SignalSection = field(default_factory=SignalSection)
    beat: BeatSection = field(default_factory=BeatSection)
    path: PathSection = field(default_factory=PathSection)
    detector: DetectorSection = field(default_factory=DetectorSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    simulation: SimulationSection = field(default_factory=SimulationSection)
    spectrum: SpectrumSection = field(default_factory=SpectrumSection)
    fringe: FringeSection = field(default_factory=FringeSection)
    reference: ReferenceSection = field(default_factory=ReferenceSection)
    expectations: tuple[Expectation, ...] = ()

    @property
    def noise_model(self) -> NoiseModel:
        return NoiseModel(self.noise.model)

    @property
    def runs_monte_carlo(self) -> bool:
        return self.simulation.trials > 0

    def lo_field(self) -> FieldSpec:
        lo = self.local_oscillator
        return field_from_power(lo.power_mw * 1e-3, lo.wavelength_nm * 1e-9, lo.phase_rad)

    def signal_field(self) -> FieldSpec:
        """Signal at the LO wavelength, offset by the heterodyne frequency."""
        return field_from_power(
            self.signal.power_pw * 1e-12,
            self.local_oscillator.wavelength_nm * 1e-9,
            self.signal.phase_rad,
            frequency_offset=self.beat_config().het_frequency,
        )

    def beat_config(self) -> BeatConfig:
        return BeatConfig(
            het_frequency=TWO_PI * self.beat.het_frequency_mhz * 1e6,
            relative_phase=self.beat.relative_phase_rad,
        )

    def optical_path(self) -> OpticalPath:
        return OpticalPath(
            collection_efficiency=self.path.collection_efficiency,
            visibility=(self.path.visibility_1, self.path.visibility_2),
        )

    def detectors(self) -> DetectorPair:
        d = self.detector
        model = DetectorModel(
            efficiency=d.efficiency,
            pulse=PulseShape(
                kind=PulseKind(d.pulse),
                area=d.pulse_area_e * constants.e,
                width=d.pulse_width_ns * 1e-9,
            ),
            electronics_psd=d.electronics_psd_a2_per_hz,
            dark_rate=d.dark_rate_hz,
        )
        return (model, model)

    def sim_config(self) -> SimConfig:
        """Sampling grid; at least one trial so the grid is always usable."""
        s = self.simulation
        return SimConfig(
            sample_rate=s.sample_rate_mhz * 1e6,
            duration=s.duration_ms * 1e-3,
            master_seed=s.master_seed,
            trials=max(1, s.trials),
            workers=s.workers,
            lo_linewidth=s.lo_linewidth_hz,
            trace_export_samples=s.trace_export_samples,
            fano_window_samples=s.fano_window_samples,
        )

    def spectrum_config(self) -> SpectrumConfig:
        s = self.spectrum
        return SpectrumConfig(
            rbw=s.rbw_khz * 1e3,
            span=(s.span_start_mhz * 1e6, s.span_stop_mhz * 1e6),
            averaging=s.averaging,
            db_reference=s.db_reference_a2,
            exclusions=tuple((lo * 1e6, hi * 1e6) for lo, hi in s.exclude_mhz),
            tone_guard=s.tone_guard_khz * 1e3,
            invalid_floor=s.invalid_floor_a2_per_hz,
        )

    def setup(self) -> BalancedSetup:
        return BalancedSetup(
            signal=self.signal_field(),
            lo=self.lo_field(),
            beat=self.beat_config(),
            path=self.optical_path(),
            detectors=self.detectors(),
            model=self.noise_model,
        )

    def with_overrides(
        self, master_seed: Optional[int] = None, trials: Optional[int] = None
    ) -> "Scenario":
        """Copy with command-line seed and trial count applied."""
        simulation = self.simulation
        if master_seed is not None:
            simulation = replace(simulation, master_seed=master_seed)
        if trials is not None:
            simulation = replace(simulation, trials=trials)
        scenario = replace(self, simulation=simulation)
        _validate_domain(scenario)
        return scenario


def _get_env(key: str, default: Optional[str] = None) -> Optional[str]:
    """Get environment variable, treating an empty value as unset."""
    return os.environ.get(key) or default


def _coerce(where: str, value: Any, kind: Any) -> Any:
    if kind is float:
        # YAML 1.1 reads exponent-only literals such as 1e-12 as strings.
        if isinstance(value, str):
            try:
                return float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioValidationError(f"{where} must be a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioValidationError(f"{where} must be an integer, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ScenarioValidationError(f"{where} must be text, got {value!r}")
        return value
    if kind == Optional[float]:
        return None if value is None else _coerce(where, value, float)
    if kind == Intervals:
        if not isinstance(value, list):
            raise ScenarioValidationError(f"{where} must be a list of [start, stop] pairs")
        intervals = []
        for index, pair in enumerate(value):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ScenarioValidationError(f"{where}[{index}] must be a [start, stop] pair")
            intervals.append(tuple(_coerce(f"{where}[{index}]", v, float) for v in pair))
        return tuple(intervals)
    raise TypeError(f"no coercion for {kind!r}")


def _parse_section(name: str, raw: Any) -> Any:
    cls = SECTIONS[name]
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ScenarioValidationError(f"section {name} must be a mapping of key: value")

    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ScenarioValidationError(
            f"unknown key(s) in section {name}: {', '.join(unknown)}; "
            f"expected {', '.join(known)}"
        )
    values = {key: _coerce(f"{name}.{key}", raw[key], known[key].type) for key in raw}
    return cls(**values)


def _parse_expectations(raw: Any) -> tuple[Expectation, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise ScenarioValidationError("expectations must be a list")

    expectations = []
    for index, item in enumerate(raw):
        where = f"expectations[{index}]"
        if not isinstance(item, dict):
            raise ScenarioValidationError(f"{where} must be a mapping")
        missing = [k for k in ("metric", "target", "tolerance") if k not in item]
        if missing:
            raise ScenarioValidationError(f"{where} is missing {', '.join(missing)}")
        extra = sorted(set(item) - {"metric", "target", "tolerance", "note"})
        if extra:
            raise ScenarioValidationError(f"{where} has unknown key(s) {', '.join(extra)}")
        metric = _coerce(f"{where}.metric", item["metric"], str)
        if metric not in METRIC_NAMES:
            raise ScenarioValidationError(
                f"{where}.metric: unknown metric {metric!r}; known metrics are "
                f"{', '.join(METRIC_NAMES)}"
            )
        try:
            expectations.append(
                Expectation(
                    metric=metric,
                    target=_coerce(f"{where}.target", item["target"], float),
                    tolerance=_coerce(f"{where}.tolerance", item["tolerance"], float),
                    note=_coerce(f"{where}.note", item.get("note", ""), str),
                )
            )
        except ValueError as e:
            raise ScenarioValidationError(f"{where}: {e}") from e
    return tuple(expectations)


def _validate_domain(scenario: Scenario) -> None:
    """Build every physical object once so bad values are reported by section."""
    builders = (
        ("noise", lambda: scenario.noise_model),
        ("local_oscillator", scenario.lo_field),
        ("signal", scenario.signal_field),
        ("path", scenario.optical_path),
        ("detector", scenario.detectors),
        ("simulation", scenario.sim_config),
        ("spectrum", scenario.spectrum_config),
    )
    for section, build in builders:
        try:
            build()
        except ValueError as e:
            raise ScenarioValidationError(f"{section}: {e}") from e

    if scenario.simulation.trials < 0:
        raise ScenarioValidationError("simulation.trials must be non-negative")
    if scenario.fringe.samples < 8 or scenario.fringe.periods <= 0:
        raise ScenarioValidationError("fringe: needs at least 8 samples and positive periods")
    if scenario.fringe.noise_fraction < 0:
        raise ScenarioValidationError("fringe.noise_fraction must be non-negative")
    if scenario.reference.resolution_db < 0:
        raise ScenarioValidationError("reference.resolution_db must be non-negative")

    if not scenario.runs_monte_carlo:
        needs_mc = [e.metric for e in scenario.expectations if e.metric in MONTE_CARLO_METRICS]
        if needs_mc:
            raise ScenarioValidationError(
                f"expectation(s) on {', '.join(needs_mc)} need simulation.trials > 0"
            )
        return

    nyquist_mhz = scenario.simulation.sample_rate_mhz / 2.0
    if scenario.spectrum.span_stop_mhz > nyquist_mhz:
        raise ScenarioValidationError(
            f"spectrum.span_stop_mhz {scenario.spectrum.span_stop_mhz:g} exceeds the "
            f"Nyquist frequency {nyquist_mhz:g} MHz"
        )
    if abs(scenario.beat.het_frequency_mhz) >= nyquist_mhz:
        raise ScenarioValidationError(
            f"beat.het_frequency_mhz {scenario.beat.het_frequency_mhz:g} is not below the "
            f"Nyquist frequency {nyquist_mhz:g} MHz"
        )


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """
    Parse and validate scenario text.

    Args:
        text: YAML document
        source: Name used in log messages

    Returns:
        Validated Scenario with every default filled

    Raises:
        ScenarioParseError: If the text is not valid YAML
        ScenarioValidationError: If fields are missing, unknown or out of range
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(e, "problem", None) or str(e)
        raise ScenarioParseError(f"invalid scenario syntax in {source}: {problem}", line) from e

    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ScenarioValidationError("a scenario must be a mapping of sections")

    missing = [key for key in REQUIRED_FIELDS if _lookup(raw, key) is None]
    if missing:
        raise ScenarioValidationError(f"missing required field(s): {', '.join(missing)}")

    unknown = sorted(set(raw) - set(_TOP_LEVEL_KEYS))
    if unknown:
        raise ScenarioValidationError(f"unknown section(s): {', '.join(unknown)}")

    scenario = Scenario(
        name=_coerce("name", raw["name"], str),
        description=_coerce("description", raw.get("description", ""), str),
        out_dir=None if raw.get("out_dir") is None else _coerce("out_dir", raw["out_dir"], str),
        expectations=_parse_expectations(raw.get("expectations")),
        **{name: _parse_section(name, raw.get(name)) for name in SECTIONS},
    )
    _validate_domain(scenario)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "Scenario %s from %s with defaults filled:\n%s",
            scenario.name,
            source,
            dump_scenario(scenario),
        )
    return scenario


def _lookup(raw: dict, dotted: str) -> Any:
    value: Any = raw
    for part in dotted.split("."):
        if not isinstance(value, dict):
            return None
        value = value.get(part)
    return value


def load_scenario(path: Path) -> Scenario:
    """
    Load a scenario file.

    Raises:
        ScenarioParseError: If the file cannot be read or is not valid YAML
        ScenarioValidationError: If the contents are invalid
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioParseError(f"cannot read scenario file {path}: {e}") from e
    return parse_scenario(text, str(path))


def _plain(value: Any) -> Any:
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def dump_scenario(scenario: Scenario) -> str:
    """Serialize a scenario with every key written out; parse_scenario reads it back unchanged."""
    data: dict[str, Any] = {"name": scenario.name}
    if scenario.description:
        data["description"] = scenario.description
    if scenario.out_dir is not None:
        data["out_dir"] = scenario.out_dir
    for name in SECTIONS:
        data[name] = _plain(asdict(getattr(scenario, name)))
    data["expectations"] = [_plain(asdict(e)) for e in scenario.expectations]
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)


def resolve_out_dir(cli_value: Optional[str], scenario: Optional[Scenario] = None) -> Path:
    """Output directory: command line, then HETNOISE_OUT_DIR, then the scenario file."""
    if cli_value:
        return Path(cli_value)
    env_value = _get_env(ENV_OUT_DIR)
    if env_value:
        return Path(env_value)
    if scenario is not None and scenario.out_dir:
        return Path(scenario.out_dir)
    return DEFAULT_OUT_DIR


def configure_logging(level: str, force_color: Optional[bool] = None) -> None:
    """Configure colored logging for the application."""
    from .utils.logging import setup_colored_logging

    setup_colored_logging(level, force_color)
