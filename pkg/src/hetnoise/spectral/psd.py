"""Spectrum-analyzer emulation: averaged periodograms with RBW semantics.

The RBW is the equivalent noise bandwidth of a Hann window (1.5 bins), not
the FFT bin spacing, so that the power in a bin is psd * rbw as on a bench
analyzer with an rms detector.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt
from scipy import signal as sps

from ..models import NoiseSpectrum, SpectrumConfig

logger = logging.getLogger(__name__)

WINDOW = "hann"
HANN_ENBW_BINS = 1.5
DOUBLING_DB = 10.0 * math.log10(2.0)

Interval = tuple[float, float]


class SpectrumRangeError(ValueError):
    """Raised when a trace or band is too small for the requested analysis."""


class SpectrumShapeError(ValueError):
    """Raised when spectra on different grids are combined."""


def window_length(sample_rate: float, rbw: float) -> int:
    """Hann window length whose equivalent noise bandwidth is closest to rbw."""
    return max(4, int(round(HANN_ENBW_BINS * sample_rate / rbw)))


def minimum_trace_length(sample_rate: float, rbw: float) -> int:
    """Samples needed for two half-overlapping windows (and at least 2 * sample_rate / rbw)."""
    nperseg = window_length(sample_rate, rbw)
    two_windows = nperseg + (nperseg - nperseg // 2)
    return max(two_windows, math.ceil(2.0 * sample_rate / rbw))


def estimate_psd(
    trace: npt.ArrayLike, sample_rate: float, cfg: SpectrumConfig
) -> NoiseSpectrum:
    """
    One-sided PSD of a trace by Welch averaging (Hann, 50% overlap).

    Args:
        trace: Current samples (A)
        sample_rate: Sampling rate (Hz)
        cfg: RBW, span and dB reference

    Returns:
        NoiseSpectrum restricted to the span; its rbw is the realized window ENBW

    Raises:
        SpectrumRangeError: If the trace is shorter than two windows or the span
            holds no frequency bins
    """
    samples = np.asarray(trace, dtype=np.float64)
    required = minimum_trace_length(sample_rate, cfg.rbw)
    if len(samples) < required:
        raise SpectrumRangeError(
            f"trace of {len(samples)} samples is too short for rbw {cfg.rbw:g} Hz at "
            f"{sample_rate:g} Hz; at least {required} samples are required"
        )

    nperseg = window_length(sample_rate, cfg.rbw)
    window = sps.get_window(WINDOW, nperseg)
    enbw = sample_rate * float(np.sum(window**2)) / float(np.sum(window)) ** 2

    freqs, psd = sps.welch(
        samples,
        fs=sample_rate,
        window=window,
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend="constant",
        return_onesided=True,
        scaling="density",
    )

    f_lo, f_hi = cfg.span
    keep = (freqs >= f_lo) & (freqs <= f_hi)
    if not keep.any():
        raise SpectrumRangeError(f"span {cfg.span} Hz holds no bins of the estimate")

    logger.debug(
        "Welch estimate: %d samples, window %d, ENBW %.6g Hz, %d bins kept",
        len(samples),
        nperseg,
        enbw,
        int(keep.sum()),
    )
    return NoiseSpectrum(
        freqs=freqs[keep],
        psd=psd[keep],
        rbw=enbw,
        db_reference=cfg.db_reference,
    )


def average_spectra(spectra: Sequence[NoiseSpectrum]) -> NoiseSpectrum:
    """Mean PSD of spectra on one grid, reduced in the given order."""
    if not spectra:
        raise SpectrumRangeError("no spectra to average")
    first = spectra[0]
    for other in spectra[1:]:
        if not first.matches_grid(other):
            raise SpectrumShapeError("spectra to average must share frequency grid and rbw")
    psd = np.mean(np.stack([s.psd for s in spectra]), axis=0)
    valid = np.logical_and.reduce([s.valid for s in spectra])
    return NoiseSpectrum(first.freqs, psd, first.rbw, first.db_reference, valid)


def _residual_mask(
    spectrum: NoiseSpectrum, exclusions: Sequence[Interval]
) -> npt.NDArray[np.bool_]:
    assert spectrum.valid is not None
    mask = spectrum.valid.copy()
    for lo, hi in exclusions:
        mask &= ~((spectrum.freqs >= lo) & (spectrum.freqs <= hi))
    if not mask.any():
        raise SpectrumRangeError("exclusions and invalid bins leave no band to evaluate")
    return mask


def noise_floor(spectrum: NoiseSpectrum, exclusions: Sequence[Interval] = ()) -> float:
    """
    Median bin power (dB) over bins outside the exclusion intervals.

    Raises:
        SpectrumRangeError: If nothing is left after exclusions
    """
    mask = _residual_mask(spectrum, exclusions)
    return float(np.median(spectrum.power_db[mask]))


def floor_flatness(spectrum: NoiseSpectrum, exclusions: Sequence[Interval] = ()) -> float:
    """Standard deviation (dB) of bin powers across the residual band."""
    mask = _residual_mask(spectrum, exclusions)
    return float(np.std(spectrum.power_db[mask]))


def subtract_electronics(
    total: NoiseSpectrum, dark: NoiseSpectrum, floor: Optional[float] = None
) -> NoiseSpectrum:
    """
    Remove the electronics (dark) spectrum from a measured one, bin by bin.

    Bins where the dark PSD reaches the total are clamped to `floor` (A^2/Hz)
    when one is given, otherwise marked invalid.

    Raises:
        SpectrumShapeError: If the grids or rbw differ
    """
    if not total.matches_grid(dark):
        raise SpectrumShapeError("total and dark spectra must share frequency grid and rbw")

    assert total.valid is not None and dark.valid is not None
    overlapped = (dark.psd >= total.psd) & (dark.psd > 0)
    difference = np.where(overlapped, 0.0, total.psd - dark.psd)
    valid = total.valid & dark.valid

    if floor is not None:
        difference = np.where(overlapped, floor, difference)
    else:
        valid = valid & ~overlapped

    if overlapped.any():
        logger.warning(
            "%d bin(s) have dark noise at or above the total; %s",
            int(overlapped.sum()),
            f"clamped to {floor:g} A^2/Hz" if floor is not None else "marked invalid",
        )
    return NoiseSpectrum(total.freqs, difference, total.rbw, total.db_reference, valid)


@dataclass(frozen=True)
class ShiftCheck:
    """Floor difference between two spectra compared with the 3 dB doubling step."""

    difference_db: float
    target_db: float
    tolerance_db: float

    @property
    def passed(self) -> bool:
        return abs(self.difference_db - self.target_db) <= self.tolerance_db


def check_3db_shift(
    spec_a: NoiseSpectrum,
    spec_b: NoiseSpectrum,
    exclusions: Sequence[Interval] = (),
    tolerance_db: float = 0.1,
    target_db: float = DOUBLING_DB,
) -> ShiftCheck:
    """Floor of spec_b minus floor of spec_a, checked against a doubling of LO power."""
    difference = noise_floor(spec_b, exclusions) - noise_floor(spec_a, exclusions)
    check = ShiftCheck(difference, target_db, tolerance_db)
    logger.info(
        "Floor shift %.4f dB (target %.4f +/- %.4f): %s",
        difference,
        target_db,
        tolerance_db,
        "pass" if check.passed else "fail",
    )
    return check
