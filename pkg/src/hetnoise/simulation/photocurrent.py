"""Monte Carlo photodetection by inhomogeneous Poisson thinning.

Photoevents are counted per sample bin: candidates are drawn at the peak
detected rate of the run and kept with probability eta * rate / peak. Counts
are then shaped by the bin-averaged current pulse. The local oscillator is a
classical field; shot noise comes only from detecting the total intensity.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np
import numpy.typing as npt
from scipy import signal as sps

from ..models import (
    BeatConfig,
    DetectorModel,
    DetectorPair,
    FieldSpec,
    FloatArray,
    NoiseModel,
    OpticalPath,
    PhotocurrentTrace,
    PulseShape,
    SimConfig,
)
from ..noise.pulses import discrete_kernel
from ..optics.fields import output_intensities
from .seeding import (
    DETECTOR_1_STREAM,
    DETECTOR_2_STREAM,
    EXCESS_STREAM,
    PHASE_STREAM,
    trial_generator,
)

logger = logging.getLogger(__name__)

RateFunction = Callable[[FloatArray], FloatArray]
CountArray = npt.NDArray[np.int64]


class SimulationDomainError(ValueError):
    """Raised when a simulation input is outside its physical domain."""


def _bin_midpoints(cfg: SimConfig) -> FloatArray:
    return cfg.times() + 0.5 * cfg.dt


def draw_photoevents(
    rate_fn: RateFunction,
    detector: DetectorModel,
    cfg: SimConfig,
    rng: np.random.Generator,
) -> CountArray:
    """
    Photoevent counts per sample bin from an inhomogeneous Poisson process.

    Args:
        rate_fn: Photon rate (s^-1) as a function of time, evaluated at bin midpoints
        detector: Detector whose efficiency thins the process
        cfg: Sampling grid
        rng: Random generator

    Returns:
        Integer counts, one per sample bin

    Raises:
        SimulationDomainError: If the rate is negative or not finite anywhere
    """
    midpoints = _bin_midpoints(cfg)
    rates = np.broadcast_to(np.asarray(rate_fn(midpoints), dtype=np.float64), midpoints.shape)

    bad = np.flatnonzero(~np.isfinite(rates) | (rates < 0))
    if bad.size:
        k = int(bad[0])
        raise SimulationDomainError(
            f"photon rate {rates[k]:.6g} s^-1 at t={midpoints[k]:.9g} s is not a valid rate"
        )

    detected = detector.efficiency * rates
    peak = float(detected.max())
    counts = np.zeros(cfg.samples, dtype=np.int64)
    if peak > 0:
        candidates = rng.poisson(peak * cfg.dt, size=cfg.samples)
        counts = rng.binomial(candidates, detected / peak).astype(np.int64)
    if detector.dark_rate > 0:
        counts = counts + rng.poisson(detector.dark_rate * cfg.dt, size=cfg.samples)
    return counts


def shape_pulses(events: FloatArray, pulse: PulseShape, sample_rate: float) -> FloatArray:
    """Convolve per-bin event weights with the bin-averaged pulse (A)."""
    kernel = discrete_kernel(pulse, sample_rate)
    weights = np.asarray(events, dtype=np.float64)
    if len(kernel) == 1:
        return weights * kernel[0]
    return sps.oaconvolve(weights, kernel)[: len(weights)]


def _add_electronics(
    current: FloatArray, detector: DetectorModel, cfg: SimConfig, rng: np.random.Generator
) -> FloatArray:
    if detector.electronics_psd <= 0:
        return current
    sigma = math.sqrt(detector.electronics_psd * cfg.sample_rate / 2.0)
    return current + rng.normal(0.0, sigma, size=len(current))


def simulate_detector(
    rate_fn: RateFunction,
    detector: DetectorModel,
    cfg: SimConfig,
    rng: Optional[np.random.Generator] = None,
) -> FloatArray:
    """
    Sampled photocurrent of one detector driven by rate_fn.

    Deterministic for a given generator; defaults to the first detector stream
    of trial 0 under cfg.master_seed.
    """
    if rng is None:
        rng = trial_generator(cfg.master_seed, 0, DETECTOR_1_STREAM)
    counts = draw_photoevents(rate_fn, detector, cfg, rng)
    current = shape_pulses(counts.astype(np.float64), detector.pulse, cfg.sample_rate)
    return _add_electronics(current, detector, cfg, rng)


def lo_phase_walk(cfg: SimConfig, rng: np.random.Generator) -> FloatArray:
    """Random-walk LO phase for a Lorentzian linewidth (variance 2 pi dnu t)."""
    if cfg.lo_linewidth <= 0:
        return np.zeros(cfg.samples)
    step = math.sqrt(2.0 * math.pi * cfg.lo_linewidth * cfg.dt)
    return np.cumsum(rng.normal(0.0, step, size=cfg.samples))


def image_band_excess(
    i1: FloatArray,
    i2: FloatArray,
    detectors: DetectorPair,
    path: OpticalPath,
    cfg: SimConfig,
    rng: np.random.Generator,
) -> FloatArray:
    """Gaussian excess on J- whose PSD is eta_c V^2 times the shot PSD."""
    weight = path.collection_efficiency * path.mean_visibility**2
    excess = np.zeros(cfg.samples)
    for detector, intensity in zip(detectors, (i1, i2)):
        mean_counts = weight * detector.efficiency * intensity * cfg.dt
        white = rng.normal(0.0, 1.0, size=cfg.samples) * np.sqrt(mean_counts)
        excess += shape_pulses(white, detector.pulse, cfg.sample_rate)
    return excess


def simulate_balanced(
    signal: FieldSpec,
    lo: FieldSpec,
    beat: BeatConfig,
    path: OpticalPath,
    detectors: DetectorPair,
    model: NoiseModel,
    cfg: SimConfig,
    trial: int = 0,
) -> PhotocurrentTrace:
    """
    One trial of the balanced detector: both ports, differenced.

    Each detector draws from its own stream of the trial. Under the image-band
    model in heterodyne mode an excess x is added as +x/2 to J1 and -x/2 to J2.
    The noiseless model returns the mean currents.

    Raises:
        SimulationDomainError: If the beat is not resolved by the sample rate or
            an intensity is negative
    """
    if cfg.sample_rate <= 2.0 * beat.het_frequency_hz:
        raise SimulationDomainError(
            f"sample rate {cfg.sample_rate:.6g} Hz does not resolve the "
            f"{beat.het_frequency_hz:.6g} Hz beat"
        )

    midpoints = _bin_midpoints(cfg)
    phase = lo_phase_walk(cfg, trial_generator(cfg.master_seed, trial, PHASE_STREAM))
    i1, i2 = (
        np.asarray(i, dtype=np.float64)
        for i in output_intensities(signal, lo, beat, path, midpoints, phase_noise=phase)
    )

    if model is NoiseModel.CLASSICAL_NOISELESS:
        j1, j2 = (
            shape_pulses(d.efficiency * i * cfg.dt, d.pulse, cfg.sample_rate)
            for d, i in zip(detectors, (i1, i2))
        )
        return PhotocurrentTrace.from_ports(j1, j2, cfg.sample_rate, cfg.master_seed, trial)

    j1 = simulate_detector(
        lambda _t: i1,
        detectors[0],
        cfg,
        trial_generator(cfg.master_seed, trial, DETECTOR_1_STREAM),
    )
    j2 = simulate_detector(
        lambda _t: i2,
        detectors[1],
        cfg,
        trial_generator(cfg.master_seed, trial, DETECTOR_2_STREAM),
    )

    if model is NoiseModel.IMAGE_BAND and not beat.is_homodyne:
        excess = image_band_excess(
            i1, i2, detectors, path, cfg, trial_generator(cfg.master_seed, trial, EXCESS_STREAM)
        )
        j1 = j1 + 0.5 * excess
        j2 = j2 - 0.5 * excess

    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "Trial %d: mean J1=%.6g A, mean J2=%.6g A, var J-=%.6g A^2",
            trial,
            float(np.mean(j1)),
            float(np.mean(j2)),
            float(np.var(j1 - j2)),
        )
    return PhotocurrentTrace.from_ports(j1, j2, cfg.sample_rate, cfg.master_seed, trial)


def fano_factor(counts: CountArray, window: int) -> float:
    """
    Variance-to-mean ratio of counts summed over disjoint windows.

    Raises:
        SimulationDomainError: If fewer than two windows fit or no events occurred
    """
    windows = len(counts) // window
    if windows < 2:
        raise SimulationDomainError(
            f"{len(counts)} bins hold fewer than two windows of {window} samples"
        )
    sums = np.asarray(counts[: windows * window], dtype=np.float64).reshape(windows, window).sum(1)
    mean = float(np.mean(sums))
    if mean == 0:
        raise SimulationDomainError("no photoevents to estimate a Fano factor from")
    return float(np.var(sums, ddof=1)) / mean
