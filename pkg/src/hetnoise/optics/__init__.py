"""Signal and local-oscillator fields at the balanced beamsplitter."""

from .fields import (
    OpticsDomainError,
    beat_signal,
    field_from_power,
    fringe_scan_from_fields,
    output_intensities,
    photon_rate_from_power,
)

__all__ = [
    "OpticsDomainError",
    "beat_signal",
    "field_from_power",
    "fringe_scan_from_fields",
    "output_intensities",
    "photon_rate_from_power",
]
