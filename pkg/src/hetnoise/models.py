"""Core data models for balanced heterodyne/homodyne noise analysis."""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy import constants

from .utils.colors import get_formatter

FloatArray = npt.NDArray[np.float64]

TWO_PI = 2.0 * math.pi


class NoiseModel(Enum):
    """Competing descriptions of the fluctuation terms in the photocurrents."""

    COHERENCE = "coherence"
    IMAGE_BAND = "image_band"
    CLASSICAL_NOISELESS = "classical_noiseless"

    @property
    def display_name(self) -> str:
        """Human-readable name for the model."""
        names = {
            NoiseModel.COHERENCE: "Glauber coherence",
            NoiseModel.IMAGE_BAND: "image band",
            NoiseModel.CLASSICAL_NOISELESS: "classical noiseless",
        }
        return names[self]


class PulseKind(Enum):
    """Photoelectron current pulse shapes."""

    DELTA = "delta"
    RECTANGULAR = "rectangular"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class FieldSpec:
    """Monochromatic coherent field in photon-flux units (|amplitude|^2 = photons/s)."""

    frequency: float
    flux_amplitude: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if not self.frequency > 0:
            raise ValueError(f"frequency must be positive, got {self.frequency}")
        if not self.flux_amplitude >= 0:
            raise ValueError(f"flux_amplitude must be non-negative, got {self.flux_amplitude}")
        if not math.isfinite(self.phase):
            raise ValueError(f"phase must be finite, got {self.phase}")
        object.__setattr__(self, "phase", self.phase % TWO_PI)

    @property
    def photon_rate(self) -> float:
        """Photon flux in photons per second."""
        return self.flux_amplitude**2

    def with_flux(self, flux_amplitude: float) -> "FieldSpec":
        """Copy of this field with another amplitude."""
        return FieldSpec(self.frequency, flux_amplitude, self.phase)


@dataclass(frozen=True)
class BeatConfig:
    """Heterodyne frequency Omega = w_s - w_l (rad/s) and relative phase phi."""

    het_frequency: float = 0.0
    relative_phase: float = 0.0

    @property
    def is_homodyne(self) -> bool:
        """True for a zero beat frequency."""
        return self.het_frequency == 0.0

    @property
    def het_frequency_hz(self) -> float:
        """Beat frequency in Hz."""
        return abs(self.het_frequency) / TWO_PI

    @classmethod
    def from_fields(
        cls, signal: FieldSpec, lo: FieldSpec, relative_phase: float = 0.0
    ) -> "BeatConfig":
        """Derive the beat from the two optical frequencies."""
        return cls(het_frequency=signal.frequency - lo.frequency, relative_phase=relative_phase)


@dataclass(frozen=True)
class OpticalPath:
    """Collection efficiency and per-detector fringe visibility."""

    collection_efficiency: float = 1.0
    visibility: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self) -> None:
        if not 0.0 <= self.collection_efficiency <= 1.0:
            raise ValueError(
                f"collection_efficiency must be within [0, 1], got {self.collection_efficiency}"
            )
        if len(self.visibility) != 2:
            raise ValueError("visibility must hold one value per detector")
        for index, value in enumerate(self.visibility, start=1):
            if not 0.0 <= value <= 1.0:
                raise ValueError(
                    f"visibility of detector {index} must be within [0, 1], got {value}"
                )

    @property
    def mean_visibility(self) -> float:
        """Mean of the two detector visibilities."""
        return (self.visibility[0] + self.visibility[1]) / 2.0


@dataclass(frozen=True)
class PulseShape:
    """Current pulse j(t) produced by one photoelectron; causal, integrates to area."""

    kind: PulseKind = PulseKind.RECTANGULAR
    area: float = constants.e
    width: float = 10e-9

    def __post_init__(self) -> None:
        if not self.area > 0:
            raise ValueError(f"pulse area must be positive, got {self.area}")
        if self.kind is not PulseKind.DELTA and not self.width > 0:
            raise ValueError(f"pulse width must be positive for {self.kind.value} pulses")


@dataclass(frozen=True)
class DetectorModel:
    """Photodetector: quantum efficiency, pulse response and electronics noise."""

    efficiency: float = 1.0
    pulse: PulseShape = field(default_factory=PulseShape)
    electronics_psd: float = 0.0
    dark_rate: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must be within [0, 1], got {self.efficiency}")
        if self.electronics_psd < 0:
            raise ValueError(f"electronics_psd must be non-negative, got {self.electronics_psd}")
        if self.dark_rate < 0:
            raise ValueError(f"dark_rate must be non-negative, got {self.dark_rate}")


DetectorPair = tuple[DetectorModel, DetectorModel]


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo run parameters."""

    sample_rate: float
    duration: float
    master_seed: int = 0
    trials: int = 1
    workers: int = 1
    lo_linewidth: float = 0.0
    trace_export_samples: int = 4096
    fano_window_samples: int = 64

    def __post_init__(self) -> None:
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.samples < 1:
            raise ValueError("duration is shorter than one sample")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(
                f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}"
            )
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.lo_linewidth < 0:
            raise ValueError(f"lo_linewidth must be non-negative, got {self.lo_linewidth}")
        if self.fano_window_samples < 1:
            raise ValueError("fano_window_samples must be at least 1")

    @property
    def samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    def times(self) -> FloatArray:
        """Sample instants k/sample_rate."""
        return np.arange(self.samples, dtype=np.float64) / self.sample_rate


@dataclass(frozen=True, eq=False)
class PhotocurrentTrace:
    """Sampled photocurrents J1, J2 and their difference J- = J1 - J2 (A)."""

    j1: FloatArray
    j2: FloatArray
    j_minus: FloatArray
    sample_rate: float
    seed_used: int
    trial: int = 0

    def __post_init__(self) -> None:
        if not (len(self.j1) == len(self.j2) == len(self.j_minus)):
            raise ValueError("j1, j2 and j_minus must have equal lengths")
        if not np.array_equal(self.j_minus, self.j1 - self.j2):
            raise ValueError("j_minus must equal j1 - j2 sample by sample")

    def __len__(self) -> int:
        return len(self.j_minus)

    def times(self) -> FloatArray:
        return np.arange(len(self), dtype=np.float64) / self.sample_rate

    @classmethod
    def from_ports(
        cls, j1: FloatArray, j2: FloatArray, sample_rate: float, seed_used: int, trial: int = 0
    ) -> "PhotocurrentTrace":
        return cls(j1, j2, j1 - j2, sample_rate, seed_used, trial)


@dataclass(frozen=True)
class SpectrumConfig:
    """Spectrum-analyzer settings: RBW, span and dB reference."""

    rbw: float
    span: tuple[float, float]
    averaging: int = 0
    detector_mode: str = "rms"
    db_reference: float = 1.0
    exclusions: tuple[tuple[float, float], ...] = ()
    tone_guard: float = 0.0
    invalid_floor: Optional[float] = None

    def __post_init__(self) -> None:
        f_lo, f_hi = self.span
        if not self.rbw > 0:
            raise ValueError("rbw must be positive")
        if not (f_hi > f_lo >= 0):
            raise ValueError(f"span must satisfy f_hi > f_lo >= 0, got {self.span}")
        if self.rbw > (f_hi - f_lo) / 10:
            raise ValueError("rbw must not exceed a tenth of the span width")
        if self.detector_mode != "rms":
            raise ValueError(f"unsupported detector mode {self.detector_mode!r}, only 'rms'")
        if self.averaging < 0:
            raise ValueError("averaging must be non-negative")
        if not self.db_reference > 0:
            raise ValueError("db_reference must be positive")
        if self.tone_guard < 0:
            raise ValueError("tone_guard must be non-negative")
        if self.invalid_floor is not None and not self.invalid_floor > 0:
            raise ValueError("invalid_floor must be positive")
        for lo, hi in self.exclusions:
            if hi < lo:
                raise ValueError(f"exclusion interval ({lo}, {hi}) is reversed")


@dataclass(frozen=True, eq=False)
class NoiseSpectrum:
    """One-sided PSD (A^2/Hz) on a frequency grid with its resolution bandwidth."""

    freqs: FloatArray
    psd: FloatArray
    rbw: float
    db_reference: float = 1.0
    valid: Optional[npt.NDArray[np.bool_]] = None

    def __post_init__(self) -> None:
        if len(self.freqs) != len(self.psd):
            raise ValueError("freqs and psd must have equal lengths")
        if len(self.freqs) > 1 and not np.all(np.diff(self.freqs) > 0):
            raise ValueError("frequency grid must be strictly increasing")
        if self.valid is None:
            object.__setattr__(self, "valid", np.ones(len(self.psd), dtype=bool))
        elif len(self.valid) != len(self.psd):
            raise ValueError("valid mask must match the psd length")

    @property
    def bin_power(self) -> FloatArray:
        """Power per bin for an rms detector: psd * rbw."""
        return self.psd * self.rbw

    @cached_property
    def power_db(self) -> FloatArray:
        """Bin power in dB relative to db_reference; NaN for invalid bins."""
        with np.errstate(divide="ignore", invalid="ignore"):
            power = 10.0 * np.log10(self.bin_power / self.db_reference)
        return np.where(self.valid, power, np.nan)

    def matches_grid(self, other: "NoiseSpectrum") -> bool:
        """True when both spectra share bins and resolution bandwidth."""
        return (
            self.rbw == other.rbw
            and len(self.freqs) == len(other.freqs)
            and bool(np.array_equal(self.freqs, other.freqs))
        )


@dataclass(frozen=True, eq=False)
class FringeScan:
    """Interference scan: one axis (phase or time) and intensity samples per detector."""

    axis: FloatArray
    intensities: tuple[FloatArray, ...]

    def __post_init__(self) -> None:
        if not self.intensities:
            raise ValueError("scan needs at least one detector trace")
        for index, trace in enumerate(self.intensities, start=1):
            if len(trace) != len(self.axis):
                raise ValueError(f"detector {index} trace length does not match the axis")
            if np.any(trace < 0):
                raise ValueError(f"detector {index} trace has negative intensities")


@dataclass(frozen=True)
class Expectation:
    """An expected outcome of a scenario: metric within tolerance of target."""

    metric: str
    target: float
    tolerance: float
    note: str = ""

    def __post_init__(self) -> None:
        if self.tolerance < 0:
            raise ValueError(f"tolerance of {self.metric} must be non-negative")


@dataclass(frozen=True)
class ExpectationResult:
    """Evaluated expectation."""

    expectation: Expectation
    value: float

    @property
    def passed(self) -> bool:
        if math.isnan(self.value):
            return False
        return abs(self.value - self.expectation.target) <= self.expectation.tolerance

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


REPORT_COLUMNS = ("kind", "name", "value", "target", "tolerance", "status", "note")


@dataclass(frozen=True)
class RunReport:
    """Outcome of one scenario run."""

    scenario_name: str
    master_seed: int
    trials: int
    noise_model: NoiseModel
    metrics: dict[str, float]
    results: tuple[ExpectationResult, ...]
    verdict: Optional[str] = None
    artifacts: tuple[Path, ...] = ()

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> tuple[ExpectationResult, ...]:
        return tuple(r for r in self.results if not r.passed)

    def to_text(self) -> str:
        """Render report as colorized text."""
        formatter = get_formatter()
        lines = [
            formatter.header(
                f"=== hetnoise scenario: {self.scenario_name} "
                f"(model {self.noise_model.value}, seed {self.master_seed}, "
                f"trials {self.trials}) ==="
            ),
            "",
            "Metrics",
        ]
        width = max((len(name) for name in self.metrics), default=0)
        for name, value in self.metrics.items():
            lines.append(f"  {formatter.metric_name(name.ljust(width))}  {value: .6g}")

        if self.results:
            lines.extend(["", "Expectations"])
        for result in self.results:
            exp = result.expectation
            status = formatter.passed(result.status) if result.passed else formatter.failed(
                result.status
            )
            line = (
                f"  {exp.metric} = {result.value:.4f} "
                f"(target {exp.target:.4f} +/- {exp.tolerance:.4f})  {status}"
            )
            if exp.note:
                line += f"  [{exp.note}]"
            lines.append(line)

        if self.verdict:
            lines.extend(["", f"Verdict: {formatter.verdict(self.verdict)}"])

        if self.artifacts:
            lines.extend(["", "Artifacts"])
            lines.extend(f"  {path}" for path in self.artifacts)

        lines.append("")
        if self.all_passed:
            lines.append(formatter.summary_ok("All expectations met."))
        else:
            lines.append(
                formatter.summary_bad(f"{len(self.failures)} expectation(s) not met.")
            )
        return "\n".join(lines)

    def to_columnar(self) -> str:
        """Render report as tab-separated columns for machine parsing."""
        lines = [
            f"# scenario: {self.scenario_name}",
            f"# noise_model: {self.noise_model.value}",
            f"# master_seed: {self.master_seed}",
            f"# trials: {self.trials}",
        ]
        if self.verdict:
            lines.append(f"# verdict: {self.verdict}")
        lines.append("\t".join(REPORT_COLUMNS))
        for name, value in self.metrics.items():
            lines.append(f"metric\t{name}\t{value!r}\t\t\t\t")
        for result in self.results:
            exp = result.expectation
            lines.append(
                f"expectation\t{exp.metric}\t{result.value!r}\t{exp.target!r}\t"
                f"{exp.tolerance!r}\t{result.status}\t{' '.join(exp.note.split())}"
            )
        for path in self.artifacts:
            lines.append(f"artifact\t{path}\t\t\t\t\t")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_columnar(cls, text: str) -> "RunReport":
        """Parse the output of to_columnar back into a report."""
        header: dict[str, str] = {}
        metrics: dict[str, float] = {}
        results: list[ExpectationResult] = []
        artifacts: list[Path] = []
        for raw in text.splitlines():
            if not raw.strip():
                continue
            if raw.startswith("#"):
                key, _, value = raw[1:].partition(":")
                header[key.strip()] = value.strip()
                continue
            cells = raw.split("\t")
            kind = cells[0]
            if kind == "metric":
                metrics[cells[1]] = float(cells[2])
            elif kind == "expectation":
                results.append(
                    ExpectationResult(
                        Expectation(
                            cells[1],
                            float(cells[3]),
                            float(cells[4]),
                            cells[6] if len(cells) > 6 else "",
                        ),
                        float(cells[2]),
                    )
                )
            elif kind == "artifact":
                artifacts.append(Path(cells[1]))
        return cls(
            scenario_name=header.get("scenario", ""),
            master_seed=int(header.get("master_seed", "0")),
            trials=int(header.get("trials", "0")),
            noise_model=NoiseModel(header.get("noise_model", NoiseModel.COHERENCE.value)),
            metrics=metrics,
            results=tuple(results),
            verdict=header.get("verdict"),
            artifacts=tuple(artifacts),
        )
