#!/usr/bin/env python3
import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """All randomness in a run comes from PCG64 (64-bit state) seeded with the run seed."""
    return np.random.Generator(np.random.PCG64(seed))


def child_seed(seed: int, stream: int) -> int:
    """Independent, reproducible sub-seed for a named stream (split, init, sampling...)."""
    return int(np.random.SeedSequence([seed, stream]).generate_state(1, dtype=np.uint64)[0])


# stream ids for child_seed
SPLIT_STREAM = 1
INIT_STREAM = 2
SAMPLING_STREAM = 3
