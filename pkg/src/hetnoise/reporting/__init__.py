"""Report serialization and delivery."""

from .base import ReportFormat, ReportSink, emit_report
from .console_sink import ConsoleSink
from .file_sink import FileSink

__all__ = ["ConsoleSink", "FileSink", "ReportFormat", "ReportSink", "emit_report"]
