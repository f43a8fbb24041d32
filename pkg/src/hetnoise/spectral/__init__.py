"""Spectrum-analyzer emulation and fringe analysis."""

from .fringe import (
    FringeAnalysisError,
    FringeFit,
    add_scan_noise,
    fit_fringe,
    fringe_visibility,
    synthesize_fringe_scan,
    visibility_from_extrema,
)
from .psd import (
    DOUBLING_DB,
    ShiftCheck,
    SpectrumRangeError,
    SpectrumShapeError,
    average_spectra,
    check_3db_shift,
    estimate_psd,
    floor_flatness,
    noise_floor,
    subtract_electronics,
)

__all__ = [
    "DOUBLING_DB",
    "FringeAnalysisError",
    "FringeFit",
    "ShiftCheck",
    "SpectrumRangeError",
    "SpectrumShapeError",
    "add_scan_noise",
    "average_spectra",
    "check_3db_shift",
    "estimate_psd",
    "fit_fringe",
    "floor_flatness",
    "fringe_visibility",
    "noise_floor",
    "subtract_electronics",
    "synthesize_fringe_scan",
    "visibility_from_extrema",
]
