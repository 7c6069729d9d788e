from enum import IntEnum

import numpy as np


class StreamTag(IntEnum):
    """Distinct stream namespaces so stages never share random draws."""

    GENERATOR = 1
    PARTITION_U = 2
    PARTITION_FW = 3
    PARTITION_FU = 4
    W_STAGE = 5
    PIPELINE = 6
    MONTE_CARLO = 7


def stream(seed: int, tag: StreamTag, *keys: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([int(seed), int(tag), *map(int, keys)])
    )


def derive_seed(seed: int, *keys: int) -> int:
    """Derived 63-bit seed, used for restarts and reruns."""
    sequence = np.random.SeedSequence([int(seed), *map(int, keys)])
    state = sequence.generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))
