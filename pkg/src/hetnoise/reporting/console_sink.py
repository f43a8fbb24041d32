"""Console sink for terminal output."""

import logging
import sys

from ..models import RunReport
from .base import ReportFormat, emit_report

logger = logging.getLogger(__name__)


class ConsoleSink:
    """Prints reports to stdout."""

    def __init__(self, fmt: ReportFormat = ReportFormat.TEXT):
        self._format = fmt

    def send(self, report: RunReport) -> bool:
        """
        Print the report to stdout.

        Returns:
            True if successful, False on write error
        """
        try:
            text = emit_report(report, self._format)
            sys.stdout.write(text if text.endswith("\n") else text + "\n")
            sys.stdout.flush()
            logger.debug("Report for %s printed to console", report.scenario_name)
            return True
        except OSError as e:
            logger.error("Failed to write to stdout: %s", e)
            return False
