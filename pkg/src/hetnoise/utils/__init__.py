"""Terminal colors and logging setup."""
