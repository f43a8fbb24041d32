"""Report formats and the sink protocol."""

from enum import Enum
from typing import Protocol

from ..models import RunReport


class ReportFormat(Enum):
    """Serialized report layouts."""

    TEXT = "text"
    COLUMNAR = "columnar"


def emit_report(report: RunReport, fmt: ReportFormat = ReportFormat.TEXT) -> str:
    """
    Serialize a report.

    Both layouts are deterministic: the same report always gives the same
    text, and the columnar layout parses back with RunReport.from_columnar.
    """
    if fmt is ReportFormat.COLUMNAR:
        return report.to_columnar()
    return report.to_text()


class ReportSink(Protocol):
    """Protocol for delivering reports."""

    def send(self, report: RunReport) -> bool:
        """
        Deliver the report.

        Args:
            report: The report to deliver

        Returns:
            True if successful, False otherwise

        Note:
            Implementations should log failures, not raise exceptions.
        """
        ...
