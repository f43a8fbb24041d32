"""Balanced heterodyne and homodyne detection: quantum-noise floors, closed form and Monte Carlo."""

__version__ = "0.1.0"
