"""Fringe visibility from least-squares sinusoid fits."""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from ..models import FloatArray, FringeScan

logger = logging.getLogger(__name__)

# Zero-padding factor of the FFT used to seed the fringe frequency.
FFT_PADDING = 8


class FringeAnalysisError(ValueError):
    """Raised when a scan cannot be described by a sinusoidal fringe."""


@dataclass(frozen=True)
class FringeFit:
    """Fitted fringe offset + amplitude * sin(frequency * x + phase)."""

    offset: float
    amplitude: float
    frequency: float
    phase: float
    residual_rms: float
    periods: float

    @property
    def visibility(self) -> float:
        """(I_max - I_min) / (I_max + I_min) of the fitted sinusoid, capped at 1."""
        return min(1.0, self.amplitude / self.offset)


def visibility_from_extrema(i_max: float, i_min: float) -> float:
    """(I_max - I_min) / (I_max + I_min)."""
    if i_max + i_min <= 0:
        raise FringeAnalysisError("extrema must have a positive sum")
    if i_min > i_max:
        raise FringeAnalysisError(f"I_min {i_min} exceeds I_max {i_max}")
    return (i_max - i_min) / (i_max + i_min)


def _sinusoid(
    x: FloatArray, offset: float, amplitude: float, frequency: float, phase: float
) -> FloatArray:
    return offset + amplitude * np.sin(frequency * x + phase)


def _initial_guess(x: FloatArray, y: FloatArray) -> list[float]:
    spacing = float(np.mean(np.diff(x)))
    padded = FFT_PADDING * len(y)
    magnitude = np.abs(np.fft.rfft(y - np.mean(y), n=padded))
    cycles = np.fft.rfftfreq(padded, d=spacing)
    peak = int(np.argmax(magnitude[1:])) + 1
    omega = 2.0 * math.pi * float(cycles[peak])

    design = np.column_stack([np.ones_like(x), np.sin(omega * x), np.cos(omega * x)])
    (offset, a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    return [float(offset), float(math.hypot(a, b)), omega, float(math.atan2(b, a))]


def fit_fringe(axis: FloatArray, intensity: FloatArray) -> FringeFit:
    """
    Least-squares sinusoid fit of one detector trace.

    Raises:
        FringeAnalysisError: If the fit fails, the trace is not oscillatory or
            covers less than one fringe period
    """
    if len(axis) < 8:
        raise FringeAnalysisError("a fringe fit needs at least 8 samples")
    x = np.asarray(axis, dtype=np.float64) - float(axis[0])
    y = np.asarray(intensity, dtype=np.float64)
    if np.ptp(y) == 0:
        raise FringeAnalysisError("trace is constant; no fringe to fit")

    # Fit on unit scales; photon rates and nanosecond axes condition poorly.
    x_scale = float(x[-1])
    y_scale = float(np.mean(np.abs(y)))
    if not x_scale > 0:
        raise FringeAnalysisError("scan axis must be increasing")
    xn, yn = x / x_scale, y / y_scale

    guess = _initial_guess(xn, yn)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, _ = curve_fit(_sinusoid, xn, yn, p0=guess, maxfev=20000)
    except (RuntimeError, ValueError) as e:
        raise FringeAnalysisError(f"sinusoid fit failed: {e}") from e

    offset, amplitude, frequency, phase = (float(p) for p in popt)
    residual = yn - _sinusoid(xn, *popt)
    residual_rms = float(np.sqrt(np.mean(residual**2))) * y_scale
    offset *= y_scale
    amplitude = abs(amplitude) * y_scale
    frequency = abs(frequency) / x_scale
    periods = frequency * x_scale / (2.0 * math.pi)

    if offset <= 0:
        raise FringeAnalysisError(f"fitted mean intensity {offset:.4g} is not positive")
    if amplitude**2 / 2.0 <= residual_rms**2:
        raise FringeAnalysisError("trace is not oscillatory: fringe power below residual noise")
    if periods < 1.0:
        raise FringeAnalysisError(f"scan covers only {periods:.2f} fringe period(s)")

    return FringeFit(offset, amplitude, frequency, phase, residual_rms, periods)


def fringe_visibility(scan: FringeScan) -> tuple[float, ...]:
    """
    Visibility seen by each detector of a scan.

    Extrema come from the fitted sinusoid rather than from raw samples, which
    noise biases outward.
    """
    visibilities = []
    for index, intensity in enumerate(scan.intensities, start=1):
        fit = fit_fringe(scan.axis, intensity)
        logger.info(
            "Detector %d: visibility %.4f over %.1f period(s), residual rms %.3g",
            index,
            fit.visibility,
            fit.periods,
            fit.residual_rms,
        )
        visibilities.append(fit.visibility)
    return tuple(visibilities)


def add_scan_noise(
    scan: FringeScan, noise_fraction: float, rng: np.random.Generator
) -> FringeScan:
    """
    Additive Gaussian noise with standard deviation noise_fraction * mean intensity.

    Readings are clipped at zero, as a photodiode cannot report negative light.
    """
    noisy = []
    for trace in scan.intensities:
        sigma = noise_fraction * float(np.mean(trace))
        noisy.append(np.clip(trace + rng.normal(0.0, sigma, size=len(trace)), 0.0, None))
    return FringeScan(axis=scan.axis, intensities=tuple(noisy))


def synthesize_fringe_scan(
    visibilities: Sequence[float],
    mean_intensity: float = 1.0,
    periods: float = 5.0,
    samples: int = 4000,
    noise_fraction: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> FringeScan:
    """Fringes m (1 +/- V sin(2 pi periods x)) on x in [0, 1), ports in antiphase."""
    axis = np.linspace(0.0, 1.0, samples, endpoint=False)
    fringe = np.sin(2.0 * math.pi * periods * axis)
    traces = tuple(
        mean_intensity * (1.0 + (1 if i % 2 == 0 else -1) * v * fringe)
        for i, v in enumerate(visibilities)
    )
    scan = FringeScan(axis=axis, intensities=traces)
    if noise_fraction > 0:
        scan = add_scan_noise(scan, noise_fraction, rng or np.random.default_rng())
    return scan
