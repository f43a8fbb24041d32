"""Headered tab-separated artifact files."""

import io
import logging
import tempfile
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from ..models import FloatArray, FringeScan, NoiseSpectrum, PhotocurrentTrace, RunReport

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("time_s", "j1_a", "j2_a", "jminus_a")
SPECTRUM_COLUMNS = ("freq_hz", "psd_a2_per_hz", "power_db")

# Enough digits to read every float64 back unchanged.
NUMBER_FORMAT = "%.17g"


class ArtifactStoreError(Exception):
    """Raised when an artifact cannot be written or read back."""


def _header_lines(kind: str, header: Mapping[str, Any]) -> list[str]:
    lines = [f"# hetnoise {kind}"]
    lines.extend(f"# {key}: {value}" for key, value in header.items())
    return lines


def _format_table(columns: tuple[str, ...], data: FloatArray) -> str:
    buffer = io.StringIO()
    buffer.write("\t".join(columns) + "\n")
    np.savetxt(buffer, data, fmt=NUMBER_FORMAT, delimiter="\t")
    return buffer.getvalue()


class ArtifactStore:
    """Writes traces, spectra, fringe scans and reports into one output directory."""

    def __init__(self, out_dir: Path):
        """
        Initialize the artifact store.

        Args:
            out_dir: Directory that receives the artifact files
        """
        self._dir = out_dir

    @property
    def out_dir(self) -> Path:
        return self._dir

    def write_trace(
        self,
        name: str,
        trace: PhotocurrentTrace,
        header: Mapping[str, Any],
        max_rows: Optional[int] = None,
    ) -> Path:
        """
        Write time, J1, J2 and J- columns of a trace.

        The seed, trial and sample rate are always echoed in the header so the
        trace can be regenerated.
        """
        rows = len(trace) if max_rows is None else min(max_rows, len(trace))
        data = np.column_stack(
            [trace.times()[:rows], trace.j1[:rows], trace.j2[:rows], trace.j_minus[:rows]]
        )
        meta = {
            **header,
            "master_seed": trace.seed_used,
            "trial": trace.trial,
            "sample_rate_hz": repr(trace.sample_rate),
            "rows": rows,
        }
        text = "\n".join(_header_lines("trace", meta)) + "\n" + _format_table(TRACE_COLUMNS, data)
        return self._write(f"{name}_trace.tsv", text)

    def write_spectrum(
        self, name: str, variant: str, spectrum: NoiseSpectrum, header: Mapping[str, Any]
    ) -> Path:
        """Write frequency, PSD and per-bin power in dB."""
        data = np.column_stack([spectrum.freqs, spectrum.psd, spectrum.power_db])
        meta = {
            **header,
            "variant": variant,
            "rbw_hz": repr(spectrum.rbw),
            "db_reference_a2": repr(spectrum.db_reference),
        }
        text = (
            "\n".join(_header_lines("spectrum", meta))
            + "\n"
            + _format_table(SPECTRUM_COLUMNS, data)
        )
        return self._write(f"{name}_{variant}_spectrum.tsv", text)

    def write_scan(self, name: str, scan: FringeScan, header: Mapping[str, Any]) -> Path:
        """Write the scan axis and one intensity column per detector."""
        columns = ("axis",) + tuple(f"i_{k}" for k in range(1, len(scan.intensities) + 1))
        data = np.column_stack([scan.axis, *scan.intensities])
        text = "\n".join(_header_lines("fringe", header)) + "\n" + _format_table(columns, data)
        return self._write(f"{name}_fringe.tsv", text)

    def write_report(self, report: RunReport) -> Path:
        return self._write(f"{report.scenario_name}_report.tsv", report.to_columnar())

    def _write(self, filename: str, text: str) -> Path:
        """
        Atomic write of one artifact.

        Writes to a temp file in the target directory, then renames it.

        Raises:
            ArtifactStoreError: If the directory or file cannot be written
        """
        path = self._dir / filename
        temp_path: Optional[Path] = None
        try:
            self._dir.mkdir(parents=True, exist_ok=True)
            with tempfile.NamedTemporaryFile(
                mode="w",
                dir=self._dir,
                prefix=".artifact_",
                suffix=".tmp",
                delete=False,
                encoding="utf-8",
            ) as f:
                temp_path = Path(f.name)
                f.write(text)

            temp_path.replace(path)
        except OSError as e:
            logger.error("Failed to write artifact %s: %s", path, e)
            if temp_path is not None and temp_path.exists():
                temp_path.unlink()
            raise ArtifactStoreError(f"Failed to write artifact {path}: {e}") from e

        logger.info("Wrote %s", path)
        return path


def read_table(path: Path) -> tuple[dict[str, str], tuple[str, ...], FloatArray]:
    """
    Read a headered table.

    Returns:
        Header key/value pairs, column names and a 2-D array with one row per line

    Raises:
        ArtifactStoreError: If the file is unreadable or malformed
    """
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ArtifactStoreError(f"Failed to read artifact {path}: {e}") from e

    header: dict[str, str] = {}
    body_start = 0
    for body_start, line in enumerate(lines):
        if not line.startswith("#"):
            break
        key, sep, value = line[1:].partition(":")
        if sep:
            header[key.strip()] = value.strip()
    else:
        raise ArtifactStoreError(f"{path} has no column line")

    columns = tuple(lines[body_start].split("\t"))
    rows = [line for line in lines[body_start + 1 :] if line.strip()]
    if not rows:
        raise ArtifactStoreError(f"{path} has no data rows")
    try:
        data = np.loadtxt(rows, delimiter="\t", ndmin=2, dtype=np.float64)
    except ValueError as e:
        raise ArtifactStoreError(f"{path} has malformed rows: {e}") from e
    if data.shape[1] != len(columns):
        raise ArtifactStoreError(
            f"{path} rows have {data.shape[1]} values for {len(columns)} columns"
        )
    return header, columns, data


def _require(header: dict[str, str], key: str, path: Path) -> str:
    if key not in header:
        raise ArtifactStoreError(f"{path} header lacks {key}")
    return header[key]


def read_trace(path: Path) -> PhotocurrentTrace:
    """Read a trace file; J- is recomputed from the two port columns."""
    header, columns, data = read_table(path)
    if columns != TRACE_COLUMNS:
        raise ArtifactStoreError(f"{path} is not a trace file (columns {columns})")
    try:
        sample_rate = float(_require(header, "sample_rate_hz", path))
        seed = int(header.get("master_seed", "0"))
        trial = int(header.get("trial", "0"))
    except ValueError as e:
        raise ArtifactStoreError(f"{path} has a malformed header: {e}") from e
    return PhotocurrentTrace.from_ports(
        np.ascontiguousarray(data[:, 1]), np.ascontiguousarray(data[:, 2]), sample_rate, seed, trial
    )


def read_spectrum(path: Path) -> NoiseSpectrum:
    """Read a spectrum file; bins written with NaN power come back invalid."""
    header, columns, data = read_table(path)
    if columns != SPECTRUM_COLUMNS:
        raise ArtifactStoreError(f"{path} is not a spectrum file (columns {columns})")
    try:
        rbw = float(_require(header, "rbw_hz", path))
        reference = float(header.get("db_reference_a2", "1.0"))
    except ValueError as e:
        raise ArtifactStoreError(f"{path} has a malformed header: {e}") from e
    return NoiseSpectrum(
        freqs=np.ascontiguousarray(data[:, 0]),
        psd=np.ascontiguousarray(data[:, 1]),
        rbw=rbw,
        db_reference=reference,
        valid=~np.isnan(data[:, 2]),
    )


def read_scan(path: Path) -> FringeScan:
    """Read a fringe scan: an axis column followed by one column per detector."""
    _, columns, data = read_table(path)
    if len(columns) < 2 or columns[0] != "axis":
        raise ArtifactStoreError(f"{path} is not a fringe scan (columns {columns})")
    try:
        return FringeScan(
            axis=np.ascontiguousarray(data[:, 0]),
            intensities=tuple(np.ascontiguousarray(data[:, k]) for k in range(1, data.shape[1])),
        )
    except ValueError as e:
        raise ArtifactStoreError(f"{path}: {e}") from e
