"""Closed-form photocurrent noise of balanced heterodyne/homodyne detection.

The differenced current J- = J1 - J2 is analysed through its autocorrelation
<dJ-(t) dJ-(t+tau)> = sum_i <dJi dJi(tau)> - sum_{i!=j} <dJi dJj(tau)>.
For coherent inputs the normally ordered intensity correlations vanish, so each
detector contributes only its shot term (eta E_l^2 / 2) int j(t') j(t'+tau) dt'
and the cross terms are zero, independent of the heterodyne frequency.
The image-band model adds an excess on J- whose PSD is the shot PSD scaled by
eta_c * V^2, present only when Omega != 0.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..models import (
    DetectorModel,
    DetectorPair,
    FieldSpec,
    FloatArray,
    NoiseModel,
    NoiseSpectrum,
    OpticalPath,
    PhotocurrentTrace,
    PulseKind,
    SpectrumConfig,
)
from .pulses import effective_energy, pulse_autocorrelation, pulse_energy, pulse_spectrum_sq

logger = logging.getLogger(__name__)

ArrayOrFloat = Union[float, FloatArray]


class NoiseDomainError(ValueError):
    """Raised when a closed form does not exist for the given inputs."""


class LagRangeError(ValueError):
    """Raised when a correlation lag does not fit inside a trace."""


def _require_finite_pulse(detector: DetectorModel) -> None:
    if detector.pulse.kind is PulseKind.DELTA:
        raise NoiseDomainError(
            "delta pulses have unbounded time-domain variance; use shot_psd instead"
        )


def excess_factor(model: NoiseModel, path: OpticalPath, het_frequency: float) -> float:
    """
    Multiplier applied to the shot PSD of J- by a noise model.

    Returns:
        1 + eta_c * V^2 for the image-band model in heterodyne mode, 1 for the
        coherence model (and image band in homodyne mode), 0 for the noiseless model
    """
    if model is NoiseModel.CLASSICAL_NOISELESS:
        return 0.0
    if model is NoiseModel.IMAGE_BAND and het_frequency != 0:
        return 1.0 + path.collection_efficiency * path.mean_visibility**2
    return 1.0


def lambda_autocorr(
    model: NoiseModel,
    signal: FieldSpec,
    lo: FieldSpec,
    t: float,
    iota: float,
    *,
    path: Optional[OpticalPath] = None,
    efficiency: float = 1.0,
) -> float:
    """
    Normally ordered intensity-fluctuation correlation lambda_i(t, iota) at one detector.

    Coherent states are eigenstates of the positive-frequency field, so every
    leading term vanishes under the coherence model. The image-band model is
    white, lambda_i(iota) = c * delta(iota); the delta weight
    c = eta_c V^2 <I_i> / (2 eta) is returned at iota = 0 and 0 elsewhere.

    Args:
        model: Noise model
        signal: Signal field (coherent)
        lo: Local-oscillator field
        t: Time (s); the correlation is stationary and does not depend on it
        iota: Lag (s)
        path: Collection efficiency and visibilities (image-band weight)
        efficiency: Detector quantum efficiency eta

    Returns:
        Correlation value (photons^2 / s for the delta weight)

    Raises:
        NoiseDomainError: For the image-band beat without a path
    """
    if model is not NoiseModel.IMAGE_BAND:
        return 0.0
    if signal.frequency == lo.frequency or iota != 0 or efficiency == 0:
        return 0.0
    if path is None:
        raise NoiseDomainError("image-band correlation needs the optical path")

    mean_intensity = 0.5 * (signal.photon_rate + lo.photon_rate)
    excess = path.collection_efficiency * path.mean_visibility**2
    return excess * mean_intensity / (2.0 * efficiency)


def shot_variance(lo: FieldSpec, detectors: DetectorPair) -> float:
    """
    Total differenced-photocurrent variance <(dJ-)^2> (A^2).

    (E_l^2 / 2) * sum_i eta_i * int j_i^2; independent of time and of the
    heterodyne frequency.

    Raises:
        NoiseDomainError: For delta pulses, whose variance is unbounded
    """
    for detector in detectors:
        _require_finite_pulse(detector)
    return sum(
        d.efficiency * lo.photon_rate / 2.0 * pulse_energy(d.pulse) for d in detectors
    )


def sampled_shot_variance(lo: FieldSpec, detectors: DetectorPair, sample_rate: float) -> float:
    """Shot variance of J- as seen on a sampled grid with bin-averaged pulses."""
    return sum(
        d.efficiency * lo.photon_rate / 2.0 * effective_energy(d.pulse, sample_rate)
        for d in detectors
    )


def shot_psd(lo: FieldSpec, detectors: DetectorPair, f: ArrayOrFloat) -> ArrayOrFloat:
    """
    One-sided shot-noise PSD of J- (A^2/Hz).

    sum_i eta_i * E_l^2 * |j_i(f)|^2, which tends to 2 eta E_l^2 q^2 below the
    pulse bandwidth.
    """
    total = sum(d.efficiency * lo.photon_rate * pulse_spectrum_sq(d.pulse, f) for d in detectors)
    return total  # type: ignore[return-value]


def detector_autocorr(lo: FieldSpec, detector: DetectorModel, tau: ArrayOrFloat) -> ArrayOrFloat:
    """Single-detector autocorrelation (eta E_l^2 / 2) int j(t') j(t' + tau) dt'."""
    _require_finite_pulse(detector)
    return detector.efficiency * lo.photon_rate / 2.0 * pulse_autocorrelation(detector.pulse, tau)


def cross_correlation(
    detectors: DetectorPair,
    model: NoiseModel,
    tau: ArrayOrFloat,
    *,
    lo: Optional[FieldSpec] = None,
    path: Optional[OpticalPath] = None,
    het_frequency: float = 0.0,
) -> ArrayOrFloat:
    """
    Cross-detector correlation <dJ1(t) dJ2(t + tau)>.

    Zero for coherent inputs. The image-band beat drives the two ports in
    antiphase, giving -(eta_c V^2 / 4) * sum_i (eta_i E_l^2 / 2) int j_i j_i(tau),
    which is what makes J- carry the full excess.

    Raises:
        NoiseDomainError: For the image-band beat without lo or path
    """
    zero = 0.0 if np.ndim(tau) == 0 else np.zeros(np.shape(tau))
    if model is not NoiseModel.IMAGE_BAND or het_frequency == 0:
        return zero
    if lo is None:
        raise NoiseDomainError("image-band cross-correlation needs the local oscillator")
    if path is None:
        raise NoiseDomainError("image-band cross-correlation needs the optical path")

    weight = path.collection_efficiency * path.mean_visibility**2 / 4.0
    shared = sum(detector_autocorr(lo, d, tau) for d in detectors)
    return -weight * shared  # type: ignore[no-any-return]


def floor_difference_db(model: NoiseModel, path: OpticalPath) -> float:
    """
    Predicted heterodyne-minus-homodyne noise floor difference (dB).

    0 under the coherence model; 10 log10(1 + eta_c V^2) under the image-band
    model, with V the mean of the two detector visibilities.
    """
    if model is not NoiseModel.IMAGE_BAND:
        return 0.0
    return 10.0 * math.log10(1.0 + path.collection_efficiency * path.mean_visibility**2)


def electronics_psd(detectors: DetectorPair) -> float:
    """White electronics-noise PSD on J- (A^2/Hz)."""
    return sum(d.electronics_psd for d in detectors)


def floor_psd(
    model: NoiseModel,
    lo: FieldSpec,
    detectors: DetectorPair,
    path: OpticalPath,
    het_frequency: float,
    f: ArrayOrFloat,
    include_electronics: bool = False,
) -> ArrayOrFloat:
    """Total analytic PSD of J- under a noise model (A^2/Hz)."""
    psd = shot_psd(lo, detectors, f) * excess_factor(model, path, het_frequency)
    if include_electronics:
        psd = psd + electronics_psd(detectors)
    return psd


def analytic_spectrum(
    model: NoiseModel,
    lo: FieldSpec,
    detectors: DetectorPair,
    path: OpticalPath,
    het_frequency: float,
    cfg: SpectrumConfig,
    include_electronics: bool = False,
) -> NoiseSpectrum:
    """Analytic J- spectrum sampled every rbw across the configured span."""
    f_lo, f_hi = cfg.span
    bins = int(math.floor((f_hi - f_lo) / cfg.rbw)) + 1
    freqs = f_lo + cfg.rbw * np.arange(bins, dtype=np.float64)
    psd = np.asarray(
        floor_psd(model, lo, detectors, path, het_frequency, freqs, include_electronics),
        dtype=np.float64,
    )
    return NoiseSpectrum(freqs=freqs, psd=psd, rbw=cfg.rbw, db_reference=cfg.db_reference)


@dataclass(frozen=True)
class AutocorrelationBreakdown:
    """The four detector terms of the J- autocorrelation at one lag."""

    lag_samples: int
    j1_auto: float
    j2_auto: float
    j12_cross: float
    j21_cross: float
    direct: float

    @property
    def total(self) -> float:
        """<dJ1 dJ1> + <dJ2 dJ2> - <dJ1 dJ2> - <dJ2 dJ1>."""
        return self.j1_auto + self.j2_auto - self.j12_cross - self.j21_cross

    @property
    def relative_mismatch(self) -> float:
        scale = max(abs(self.direct), abs(self.total))
        if scale == 0:
            return 0.0
        return abs(self.total - self.direct) / scale


def _lagged_covariance(a: FloatArray, b: FloatArray, lag: int) -> float:
    n = len(a) - lag
    return float(np.dot(a[:n], b[lag:]) / n)


def autocorr_decomposition(trace: PhotocurrentTrace, tau: float) -> AutocorrelationBreakdown:
    """
    Split the J- autocorrelation at lag tau into detector auto and cross terms.

    Raises:
        LagRangeError: If tau is negative or not shorter than the trace
    """
    lag = int(round(tau * trace.sample_rate))
    if lag < 0:
        raise LagRangeError(f"lag must be non-negative, got {tau} s")
    if lag >= len(trace):
        raise LagRangeError(
            f"lag of {lag} samples exceeds the trace length of {len(trace)} samples"
        )

    d1 = trace.j1 - np.mean(trace.j1)
    d2 = trace.j2 - np.mean(trace.j2)
    dm = trace.j_minus - np.mean(trace.j_minus)

    breakdown = AutocorrelationBreakdown(
        lag_samples=lag,
        j1_auto=_lagged_covariance(d1, d1, lag),
        j2_auto=_lagged_covariance(d2, d2, lag),
        j12_cross=_lagged_covariance(d1, d2, lag),
        j21_cross=_lagged_covariance(d2, d1, lag),
        direct=_lagged_covariance(dm, dm, lag),
    )
    logger.debug(
        "Autocorrelation at lag %d: total=%.6g direct=%.6g",
        lag,
        breakdown.total,
        breakdown.direct,
    )
    return breakdown
