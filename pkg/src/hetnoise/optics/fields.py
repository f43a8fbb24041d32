"""Mean intensities at the two output ports of a 50/50 beamsplitter.

Amplitudes are in photon-flux units, so |E|^2 is a photon rate (s^-1) and
optical power enters only through photon_rate_from_power.
"""

import logging
import math
from typing import Union

import numpy as np
from scipy import constants

from ..models import TWO_PI, BeatConfig, FieldSpec, FloatArray, FringeScan, OpticalPath

logger = logging.getLogger(__name__)

# Below this LO/signal photon-rate ratio the strong-LO approximation is doubtful.
STRONG_LO_RATIO = 100.0

ArrayOrFloat = Union[float, FloatArray]


class OpticsDomainError(ValueError):
    """Raised for physically meaningless optical inputs."""


def beat_signal(e1: ArrayOrFloat, e2: ArrayOrFloat, omega: float, t: ArrayOrFloat) -> ArrayOrFloat:
    """
    Heterodyne beat carried by the intensity cross terms.

    Args:
        e1: In-phase quadrature amplitude
        e2: Quadrature-phase amplitude
        omega: Heterodyne angular frequency (rad/s)
        t: Time (s), scalar or array

    Returns:
        e1*cos(omega*t) + e2*sin(omega*t)
    """
    return e1 * np.cos(omega * t) + e2 * np.sin(omega * t)  # type: ignore[no-any-return]


def photon_rate_from_power(power: float, wavelength: float) -> float:
    """
    Convert optical power to photon rate.

    Args:
        power: Optical power (W)
        wavelength: Vacuum wavelength (m)

    Returns:
        Photons per second, power * wavelength / (h * c)

    Raises:
        OpticsDomainError: If wavelength is not positive or power is negative
    """
    if not wavelength > 0:
        raise OpticsDomainError(f"wavelength must be positive, got {wavelength}")
    if power < 0:
        raise OpticsDomainError(f"power must be non-negative, got {power}")
    return power * wavelength / (constants.h * constants.c)


def field_from_power(
    power: float, wavelength: float, phase: float = 0.0, frequency_offset: float = 0.0
) -> FieldSpec:
    """Build a coherent field from optical power, optionally shifted by frequency_offset (rad/s)."""
    rate = photon_rate_from_power(power, wavelength)
    carrier = TWO_PI * constants.c / wavelength
    return FieldSpec(
        frequency=carrier + frequency_offset,
        flux_amplitude=math.sqrt(rate),
        phase=phase,
    )


def check_strong_lo(signal: FieldSpec, lo: FieldSpec) -> bool:
    """Warn when the LO is not at least STRONG_LO_RATIO times the signal rate."""
    if signal.photon_rate == 0:
        return True
    ratio = lo.photon_rate / signal.photon_rate
    if ratio < STRONG_LO_RATIO:
        logger.warning(
            "LO/signal photon-rate ratio %.3g is below %.0f; strong-LO approximation is weak",
            ratio,
            STRONG_LO_RATIO,
        )
        return False
    return True


def output_intensities(
    signal: FieldSpec,
    lo: FieldSpec,
    beat: BeatConfig,
    path: OpticalPath,
    t: ArrayOrFloat,
    phase_noise: ArrayOrFloat = 0.0,
) -> tuple[ArrayOrFloat, ArrayOrFloat]:
    """
    Photon rates at the two output ports under the strong-LO approximation.

    I1,2(t) = 1/2 [E_s^2 + E_l^2 +/- 2 V E_l E_s sin(Omega t + phi)], with V the
    visibility seen by each detector and phi = relative_phase + phase_s - phase_l
    (+ phase_noise).

    Args:
        signal: Signal field
        lo: Local-oscillator field
        beat: Heterodyne frequency and relative phase
        path: Per-detector visibilities
        t: Time (s), scalar or array
        phase_noise: Extra phase (rad), scalar or array aligned with t

    Returns:
        Tuple (I1, I2) in photons per second

    Raises:
        OpticsDomainError: If a field amplitude is negative
    """
    if signal.flux_amplitude < 0 or lo.flux_amplitude < 0:
        raise OpticsDomainError("field amplitudes must be non-negative")
    check_strong_lo(signal, lo)

    e_s = signal.flux_amplitude
    e_l = lo.flux_amplitude
    phi = beat.relative_phase + signal.phase - lo.phase + phase_noise
    fringe = np.sin(beat.het_frequency * np.asarray(t, dtype=np.float64) + phi)

    common = 0.5 * (e_s**2 + e_l**2)
    cross = e_l * e_s * fringe
    i1 = common + path.visibility[0] * cross
    i2 = common - path.visibility[1] * cross

    if np.ndim(i1) == 0:
        return float(i1), float(i2)
    return i1, i2


def fringe_scan_from_fields(
    signal: FieldSpec,
    lo: FieldSpec,
    beat: BeatConfig,
    path: OpticalPath,
    periods: float = 4.0,
    samples: int = 2000,
) -> FringeScan:
    """
    Noise-free interference fringes seen by both detectors.

    Heterodyne beats are scanned in time over the given number of beat periods;
    homodyne fringes are scanned by sweeping the relative phase.
    """
    if samples < 2 or periods <= 0:
        raise OpticsDomainError("a fringe scan needs at least two samples and a positive extent")

    if beat.is_homodyne:
        axis = np.linspace(0.0, TWO_PI * periods, samples, endpoint=False)
        i1, i2 = output_intensities(signal, lo, beat, path, 0.0, phase_noise=axis)
    else:
        axis = np.linspace(0.0, periods * TWO_PI / abs(beat.het_frequency), samples, endpoint=False)
        i1, i2 = output_intensities(signal, lo, beat, path, axis)

    return FringeScan(
        axis=axis,
        intensities=(np.asarray(i1, dtype=np.float64), np.asarray(i2, dtype=np.float64)),
    )
