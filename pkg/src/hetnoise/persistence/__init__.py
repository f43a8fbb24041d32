"""Artifact files for traces, spectra, fringe scans and reports."""

from .artifact_store import (
    ArtifactStore,
    ArtifactStoreError,
    read_scan,
    read_spectrum,
    read_table,
    read_trace,
)

__all__ = [
    "ArtifactStore",
    "ArtifactStoreError",
    "read_scan",
    "read_spectrum",
    "read_table",
    "read_trace",
]
