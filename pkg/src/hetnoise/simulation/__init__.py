"""Monte Carlo photocurrent generation."""

from .photocurrent import (
    SimulationDomainError,
    draw_photoevents,
    fano_factor,
    simulate_balanced,
    simulate_detector,
)
from .seeding import trial_generator
from .trials import BalancedSetup, run_trials

__all__ = [
    "BalancedSetup",
    "SimulationDomainError",
    "draw_photoevents",
    "fano_factor",
    "run_trials",
    "simulate_balanced",
    "simulate_detector",
    "trial_generator",
]
