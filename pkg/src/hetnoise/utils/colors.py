"""ANSI color utilities for terminal reports."""

import os
import sys
from typing import Optional


class ANSIColors:
    """ANSI escape codes used by reports and log output."""

    RESET = "\033[0m"

    RED = "\033[31m"
    GREEN = "\033[32m"
    YELLOW = "\033[33m"
    BLUE = "\033[34m"

    BRIGHT_BLACK = "\033[90m"
    BRIGHT_RED = "\033[91m"
    BRIGHT_GREEN = "\033[92m"
    BRIGHT_MAGENTA = "\033[95m"
    BRIGHT_CYAN = "\033[96m"
    BRIGHT_WHITE = "\033[97m"

    BOLD = "\033[1m"


class ColorFormatter:
    """Colors report text when the terminal supports it."""

    def __init__(self, force_color: Optional[bool] = None) -> None:
        """
        Initialize color formatter.

        Args:
            force_color: None = auto-detect, True = always color, False = never color
        """
        self._force_color = force_color
        self._color_support = self._detect_color_support()

    def _detect_color_support(self) -> bool:
        """Detect if the terminal supports ANSI colors."""
        if self._force_color is not None:
            return self._force_color

        if os.getenv("NO_COLOR") or os.getenv("CLICOLOR") == "0":
            return False
        if os.getenv("FORCE_COLOR") or os.getenv("CLICOLOR_FORCE"):
            return True

        # Reports piped into files or CI logs stay plain
        if not sys.stdout.isatty():
            return False

        term = os.getenv("TERM", "").lower()
        return term != "dumb"

    def format(self, text: str, *colors: str) -> str:
        """Wrap text in the given codes if colors are enabled."""
        if not self._color_support or not colors:
            return text
        return f"{''.join(colors)}{text}{ANSIColors.RESET}"

    def header(self, text: str) -> str:
        """Format a report header line."""
        return self.format(text, ANSIColors.BRIGHT_CYAN, ANSIColors.BOLD)

    def metric_name(self, text: str) -> str:
        """Format a metric name."""
        return self.format(text, ANSIColors.BRIGHT_WHITE)

    def passed(self, text: str) -> str:
        """Format a PASS status."""
        return self.format(text, ANSIColors.BRIGHT_GREEN, ANSIColors.BOLD)

    def failed(self, text: str) -> str:
        """Format a FAIL status."""
        return self.format(text, ANSIColors.BRIGHT_RED, ANSIColors.BOLD)

    def verdict(self, text: str) -> str:
        """Falsified models stand out in magenta."""
        if "falsified" in text:
            return self.format(text, ANSIColors.BRIGHT_MAGENTA, ANSIColors.BOLD)
        return self.format(text, ANSIColors.GREEN)

    def summary_ok(self, text: str) -> str:
        """Format the closing line of a successful run."""
        return self.format(text, ANSIColors.GREEN)

    def summary_bad(self, text: str) -> str:
        """Format the closing line of a run with failed expectations."""
        return self.format(text, ANSIColors.BRIGHT_RED, ANSIColors.BOLD)


# Global formatter instance
_formatter: Optional[ColorFormatter] = None


def get_formatter() -> ColorFormatter:
    """Get the global color formatter instance."""
    global _formatter
    if _formatter is None:
        _formatter = ColorFormatter()
    return _formatter


def set_color_mode(force_color: Optional[bool] = None) -> None:
    """
    Configure global color mode.

    Args:
        force_color: None = auto-detect, True = force on, False = force off
    """
    global _formatter
    _formatter = ColorFormatter(force_color)
