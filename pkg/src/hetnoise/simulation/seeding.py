"""Counter-based random streams.

Every (master seed, trial, stream) triple addresses its own Philox generator,
so a trial draws the same numbers whichever worker runs it and in whatever order.
"""

import numpy as np

DETECTOR_1_STREAM = 0
DETECTOR_2_STREAM = 1
EXCESS_STREAM = 2
PHASE_STREAM = 3
FRINGE_STREAM = 4


def trial_seed_sequence(master_seed: int, trial: int, stream: int) -> np.random.SeedSequence:
    """Seed sequence for one stream of one trial."""
    if trial < 0 or stream < 0:
        raise ValueError(f"trial and stream must be non-negative, got {trial}, {stream}")
    return np.random.SeedSequence(master_seed, spawn_key=(trial, stream))


def trial_generator(master_seed: int, trial: int, stream: int) -> np.random.Generator:
    """Philox generator for one stream of one trial."""
    return np.random.Generator(np.random.Philox(trial_seed_sequence(master_seed, trial, stream)))
