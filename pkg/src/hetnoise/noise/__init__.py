"""Closed-form noise quantities and pulse calculus."""

from .analytic import (
    AutocorrelationBreakdown,
    LagRangeError,
    NoiseDomainError,
    analytic_spectrum,
    autocorr_decomposition,
    cross_correlation,
    detector_autocorr,
    electronics_psd,
    excess_factor,
    floor_difference_db,
    floor_psd,
    lambda_autocorr,
    sampled_shot_variance,
    shot_psd,
    shot_variance,
)

__all__ = [
    "AutocorrelationBreakdown",
    "LagRangeError",
    "NoiseDomainError",
    "analytic_spectrum",
    "autocorr_decomposition",
    "cross_correlation",
    "detector_autocorr",
    "electronics_psd",
    "excess_factor",
    "floor_difference_db",
    "floor_psd",
    "lambda_autocorr",
    "sampled_shot_variance",
    "shot_psd",
    "shot_variance",
]
