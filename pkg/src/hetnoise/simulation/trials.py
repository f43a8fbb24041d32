"""Independent Monte Carlo trials with order-fixed results."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import repeat
from typing import Callable, Optional, TypeVar

from ..models import (
    BeatConfig,
    DetectorPair,
    FieldSpec,
    NoiseModel,
    OpticalPath,
    PhotocurrentTrace,
    SimConfig,
)
from .photocurrent import simulate_balanced

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class BalancedSetup:
    """Everything a balanced-detection trial needs besides the sampling grid."""

    signal: FieldSpec
    lo: FieldSpec
    beat: BeatConfig
    path: OpticalPath
    detectors: DetectorPair
    model: NoiseModel

    def simulate(self, cfg: SimConfig, trial: int = 0) -> PhotocurrentTrace:
        return simulate_balanced(
            self.signal, self.lo, self.beat, self.path, self.detectors, self.model, cfg, trial
        )

    def with_beat(self, beat: BeatConfig) -> "BalancedSetup":
        return replace(self, beat=beat)

    def with_lo_rate_scale(self, factor: float) -> "BalancedSetup":
        """Scale the LO photon rate (optical power) by factor."""
        return replace(self, lo=self.lo.with_flux(self.lo.flux_amplitude * factor**0.5))

    def dark(self) -> "BalancedSetup":
        """No light on either detector: electronics noise only."""
        return replace(
            self,
            signal=self.signal.with_flux(0.0),
            lo=self.lo.with_flux(0.0),
        )


def _run_one(
    setup: BalancedSetup, cfg: SimConfig, reducer: Callable[[PhotocurrentTrace], T], trial: int
) -> T:
    return reducer(setup.simulate(cfg, trial))


def run_trials(
    setup: BalancedSetup,
    cfg: SimConfig,
    reducer: Callable[[PhotocurrentTrace], T],
    workers: Optional[int] = None,
) -> list[T]:
    """
    Run trials 0..cfg.trials-1 and reduce each trace.

    Results are ordered by trial index whatever the worker count. With more
    than one worker, reducer must be picklable (a module-level function or a
    functools.partial of one).

    Args:
        setup: Fields, path, detectors and noise model
        cfg: Sampling grid, master seed and trial count
        reducer: Maps a trace to whatever the caller keeps from it
        workers: Process count; defaults to cfg.workers

    Returns:
        One reducer output per trial
    """
    workers = workers or cfg.workers
    trials = range(cfg.trials)
    logger.info(
        "Running %d trial(s) of %d samples (%s model, %s) on %d worker(s)",
        cfg.trials,
        cfg.samples,
        setup.model.value,
        "homodyne" if setup.beat.is_homodyne else "heterodyne",
        workers,
    )

    if workers == 1:
        return [_run_one(setup, cfg, reducer, trial) for trial in trials]

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, repeat(setup), repeat(cfg), repeat(reducer), trials))
