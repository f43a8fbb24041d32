"""Named scenario metrics over a lazily evaluated run context.

Every metric is computed from a MetricContext that runs the closed-form
pipeline, the Monte Carlo trials and the fringe analysis only when a metric
needs them, and computes each of those at most once per run.
"""

import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional

import numpy as np

from ..config import Scenario
from ..models import (
    TWO_PI,
    BeatConfig,
    FringeScan,
    NoiseModel,
    NoiseSpectrum,
    PhotocurrentTrace,
    SpectrumConfig,
)
from ..noise.analytic import (
    analytic_spectrum,
    electronics_psd,
    excess_factor,
    floor_difference_db,
    sampled_shot_variance,
    shot_variance,
)
from ..optics.fields import fringe_scan_from_fields, output_intensities
from ..simulation.photocurrent import draw_photoevents, fano_factor, lo_phase_walk
from ..simulation.seeding import DETECTOR_1_STREAM, FRINGE_STREAM, PHASE_STREAM, trial_generator
from ..simulation.trials import BalancedSetup, run_trials
from ..spectral.fringe import add_scan_noise, fringe_visibility
from ..spectral.psd import (
    average_spectra,
    check_3db_shift,
    estimate_psd,
    floor_flatness,
    noise_floor,
    subtract_electronics,
)

logger = logging.getLogger(__name__)

# Beat used for the heterodyne twin of a homodyne scenario.
DEFAULT_HET_FREQUENCY_HZ = 3e6

MAIN = "main"
HOMODYNE = "homodyne"
HETERODYNE = "heterodyne"
LO_DOUBLED = "lo_doubled"
DARK = "dark"

Interval = tuple[float, float]


@dataclass(frozen=True, eq=False)
class TrialSummary:
    """What one Monte Carlo trial contributes to the metrics."""

    spectrum: NoiseSpectrum
    variance: float
    head: Optional[PhotocurrentTrace] = None


def summarize_trace(
    trace: PhotocurrentTrace, *, spectrum_cfg: SpectrumConfig, export_rows: int
) -> TrialSummary:
    """Reduce a trace to its J- spectrum and variance; trial 0 also keeps its first rows."""
    spectrum = estimate_psd(trace.j_minus, trace.sample_rate, spectrum_cfg)
    head = None
    if trace.trial == 0:
        rows = min(export_rows, len(trace))
        head = PhotocurrentTrace.from_ports(
            trace.j1[:rows].copy(), trace.j2[:rows].copy(), trace.sample_rate, trace.seed_used
        )
    return TrialSummary(spectrum, float(np.var(trace.j_minus)), head)


@dataclass(frozen=True, eq=False)
class MonteCarloRun:
    """Summaries of all trials of one variant, in trial order."""

    summaries: tuple[TrialSummary, ...]
    averaging: int

    @property
    def spectrum(self) -> NoiseSpectrum:
        """Trial spectra averaged over the first `averaging` trials (all when 0)."""
        used = self.summaries[: self.averaging or None]
        return average_spectra([s.spectrum for s in used])

    @property
    def variances(self) -> list[float]:
        return [s.variance for s in self.summaries]

    @property
    def head(self) -> Optional[PhotocurrentTrace]:
        return self.summaries[0].head


class MetricContext:
    """Shared, lazily computed state for the metrics of one scenario run."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.setup = scenario.setup()
        self.sim = scenario.sim_config()
        self.spectrum_cfg = scenario.spectrum_config()
        self._runs: dict[str, MonteCarloRun] = {}
        self._mc_spectra: dict[str, NoiseSpectrum] = {}
        self._analytic: dict[str, NoiseSpectrum] = {}
        self._scan: Optional[FringeScan] = None
        self._visibilities: Optional[tuple[float, ...]] = None

    # Variants

    def _canonical(self, variant: str) -> str:
        homodyne = self.setup.beat.is_homodyne
        if (variant == HOMODYNE and homodyne) or (variant == HETERODYNE and not homodyne):
            return MAIN
        return variant

    def variant_setup(self, variant: str) -> BalancedSetup:
        """The balanced setup behind a named variant of the scenario."""
        variant = self._canonical(variant)
        phase = self.setup.beat.relative_phase
        if variant == MAIN:
            return self.setup
        if variant == HOMODYNE:
            return self.setup.with_beat(BeatConfig(0.0, phase))
        if variant == HETERODYNE:
            return self.setup.with_beat(BeatConfig(TWO_PI * DEFAULT_HET_FREQUENCY_HZ, phase))
        if variant == LO_DOUBLED:
            return self.setup.with_lo_rate_scale(2.0)
        if variant == DARK:
            return self.setup.dark()
        raise KeyError(f"unknown variant {variant!r}")

    def exclusions(self, *variants: str) -> tuple[Interval, ...]:
        """Configured exclusions plus a guard band around every variant's beat tone."""
        intervals = list(self.spectrum_cfg.exclusions)
        guard = self.spectrum_cfg.tone_guard
        if guard > 0:
            for variant in variants:
                beat_hz = self.variant_setup(variant).beat.het_frequency_hz
                if beat_hz > 0:
                    intervals.append((beat_hz - guard, beat_hz + guard))
        return tuple(intervals)

    # Closed form

    def analytic_spectrum(self, variant: str = MAIN) -> NoiseSpectrum:
        variant = self._canonical(variant)
        if variant not in self._analytic:
            setup = self.variant_setup(variant)
            self._analytic[variant] = analytic_spectrum(
                setup.model,
                setup.lo,
                setup.detectors,
                setup.path,
                setup.beat.het_frequency,
                self.spectrum_cfg,
            )
        return self._analytic[variant]

    def analytic_floor(self, variant: str, *exclusion_variants: str) -> float:
        return noise_floor(
            self.analytic_spectrum(variant), self.exclusions(variant, *exclusion_variants)
        )

    # Monte Carlo

    def run(self, variant: str = MAIN) -> MonteCarloRun:
        variant = self._canonical(variant)
        if variant not in self._runs:
            reducer = partial(
                summarize_trace,
                spectrum_cfg=self.spectrum_cfg,
                export_rows=self.sim.trace_export_samples,
            )
            logger.info("Monte Carlo variant %s of %s", variant, self.scenario.name)
            summaries = run_trials(self.variant_setup(variant), self.sim, reducer)
            self._runs[variant] = MonteCarloRun(tuple(summaries), self.spectrum_cfg.averaging)
        return self._runs[variant]

    def mc_spectrum(self, variant: str = MAIN) -> NoiseSpectrum:
        """Averaged J- spectrum, with the dark spectrum removed when electronics noise is on."""
        variant = self._canonical(variant)
        if variant not in self._mc_spectra:
            spectrum = self.run(variant).spectrum
            if electronics_psd(self.setup.detectors) > 0 and variant != DARK:
                spectrum = subtract_electronics(
                    spectrum, self.run(DARK).spectrum, self.spectrum_cfg.invalid_floor
                )
            self._mc_spectra[variant] = spectrum
        return self._mc_spectra[variant]

    def mc_floor(self, variant: str, *exclusion_variants: str) -> float:
        return noise_floor(self.mc_spectrum(variant), self.exclusions(variant, *exclusion_variants))

    def expected_variance(self) -> float:
        """Sampled shot variance of J-, scaled by the model's excess, plus electronics."""
        setup = self.setup
        shot = sampled_shot_variance(setup.lo, setup.detectors, self.sim.sample_rate)
        excess = excess_factor(setup.model, setup.path, setup.beat.het_frequency)
        return shot * excess + electronics_psd(setup.detectors) * self.sim.sample_rate / 2.0

    def variance_ratios(self) -> list[float]:
        expected = self.expected_variance()
        if expected == 0:
            return [math.nan for _ in self.run().variances]
        return [v / expected for v in self.run().variances]

    # Fringes

    def fringe_scan(self) -> FringeScan:
        if self._scan is None:
            setup, fringe = self.setup, self.scenario.fringe
            scan = fringe_scan_from_fields(
                setup.signal, setup.lo, setup.beat, setup.path, fringe.periods, fringe.samples
            )
            if fringe.noise_fraction > 0:
                rng = trial_generator(self.sim.master_seed, 0, FRINGE_STREAM)
                scan = add_scan_noise(scan, fringe.noise_fraction, rng)
            self._scan = scan
        return self._scan

    def visibilities(self) -> tuple[float, ...]:
        if self._visibilities is None:
            self._visibilities = fringe_visibility(self.fringe_scan())
        return self._visibilities

    def expected_visibilities(self) -> tuple[float, float]:
        """Fringe contrast the fields should produce: V_i * 2 E_s E_l / (E_s^2 + E_l^2)."""
        signal, lo = self.setup.signal, self.setup.lo
        total = signal.photon_rate + lo.photon_rate
        overlap = 2.0 * signal.flux_amplitude * lo.flux_amplitude / total if total else 0.0
        v1, v2 = self.setup.path.visibility
        return v1 * overlap, v2 * overlap

    # Artifacts

    @property
    def computed_mc_spectra(self) -> dict[str, NoiseSpectrum]:
        return dict(self._mc_spectra)

    @property
    def computed_analytic_spectra(self) -> dict[str, NoiseSpectrum]:
        return dict(self._analytic)

    @property
    def main_trace_head(self) -> Optional[PhotocurrentTrace]:
        run = self._runs.get(MAIN)
        return run.head if run is not None else None

    @property
    def computed_scan(self) -> Optional[FringeScan]:
        return self._scan


MetricFunction = Callable[[MetricContext], float]

METRICS: dict[str, MetricFunction] = {}


def metric(name: str) -> Callable[[MetricFunction], MetricFunction]:
    """Register a metric function under its scenario-file name."""

    def register(fn: MetricFunction) -> MetricFunction:
        METRICS[name] = fn
        return fn

    return register


@metric("shot_variance_a2")
def _shot_variance(ctx: MetricContext) -> float:
    return shot_variance(ctx.setup.lo, ctx.setup.detectors)


@metric("analytic_floor_db")
def _analytic_floor(ctx: MetricContext) -> float:
    return ctx.analytic_floor(MAIN)


@metric("analytic_het_hom_difference_db")
def _analytic_het_hom(ctx: MetricContext) -> float:
    het = ctx.analytic_floor(HETERODYNE, HOMODYNE)
    hom = ctx.analytic_floor(HOMODYNE, HETERODYNE)
    return _difference(het, hom)


@metric("analytic_lo_doubling_db")
def _analytic_lo_doubling(ctx: MetricContext) -> float:
    return _difference(ctx.analytic_floor(LO_DOUBLED), ctx.analytic_floor(MAIN))


@metric("predicted_imageband_difference_db")
def _predicted_imageband(ctx: MetricContext) -> float:
    return floor_difference_db(NoiseModel.IMAGE_BAND, ctx.setup.path)


@metric("floor_difference_db")
def _floor_difference(ctx: MetricContext) -> float:
    return floor_difference_db(ctx.setup.model, ctx.setup.path)


@metric("mc_floor_db")
def _mc_floor(ctx: MetricContext) -> float:
    return ctx.mc_floor(MAIN)


@metric("mc_het_hom_difference_db")
def _mc_het_hom(ctx: MetricContext) -> float:
    het = ctx.mc_floor(HETERODYNE, HOMODYNE)
    hom = ctx.mc_floor(HOMODYNE, HETERODYNE)
    return _difference(het, hom)


@metric("mc_lo_doubling_db")
def _mc_lo_doubling(ctx: MetricContext) -> float:
    check = check_3db_shift(
        ctx.mc_spectrum(MAIN), ctx.mc_spectrum(LO_DOUBLED), ctx.exclusions(MAIN, LO_DOUBLED)
    )
    return check.difference_db


@metric("mc_floor_flatness_db")
def _mc_flatness(ctx: MetricContext) -> float:
    return floor_flatness(ctx.mc_spectrum(MAIN), ctx.exclusions(MAIN))


@metric("mc_variance_ratio")
def _mc_variance_ratio(ctx: MetricContext) -> float:
    return float(np.mean(ctx.variance_ratios()))


@metric("mc_variance_zscore")
def _mc_variance_zscore(ctx: MetricContext) -> float:
    """Distance of the mean variance ratio from 1 in standard errors."""
    ratios = np.asarray(ctx.variance_ratios())
    if len(ratios) >= 2:
        stderr = float(np.std(ratios, ddof=1)) / math.sqrt(len(ratios))
    else:
        # Sample variance of n near-Gaussian samples has relative error sqrt(2 / n).
        stderr = math.sqrt(2.0 / ctx.sim.samples)
    if stderr == 0:
        return math.nan
    return (float(np.mean(ratios)) - 1.0) / stderr


@metric("mc_fano_factor")
def _mc_fano(ctx: MetricContext) -> float:
    """Fano factor of the detector-1 photoevents of trial 0."""
    setup, cfg = ctx.setup, ctx.sim
    midpoints = cfg.times() + 0.5 * cfg.dt
    phase = lo_phase_walk(cfg, trial_generator(cfg.master_seed, 0, PHASE_STREAM))
    i1, _ = output_intensities(
        setup.signal, setup.lo, setup.beat, setup.path, midpoints, phase_noise=phase
    )
    rates = np.asarray(i1, dtype=np.float64)
    counts = draw_photoevents(
        lambda _t: rates,
        setup.detectors[0],
        cfg,
        trial_generator(cfg.master_seed, 0, DETECTOR_1_STREAM),
    )
    return fano_factor(counts, cfg.fano_window_samples)


@metric("visibility_1")
def _visibility_1(ctx: MetricContext) -> float:
    return ctx.visibilities()[0]


@metric("visibility_2")
def _visibility_2(ctx: MetricContext) -> float:
    return ctx.visibilities()[1]


@metric("visibility_error")
def _visibility_error(ctx: MetricContext) -> float:
    """Largest deviation of a recovered visibility from the configured contrast."""
    measured = ctx.visibilities()
    return max(abs(m - e) for m, e in zip(measured, ctx.expected_visibilities()))


def _difference(a: float, b: float) -> float:
    # Two empty floors (-inf dB) differ by nothing.
    if math.isinf(a) and math.isinf(b) and a == b:
        return 0.0
    return a - b


def compute_metric(ctx: MetricContext, name: str) -> float:
    """Evaluate one registered metric."""
    try:
        fn = METRICS[name]
    except KeyError:
        raise KeyError(f"unknown metric {name!r}") from None
    value = fn(ctx)
    logger.info("%s = %.6g", name, value)
    return value
