"""Named random substreams.

Every (seed, purpose) pair gets its own independent generator so that, e.g.,
two agents run on the same seed see exactly the same covariates and noise
regardless of how many forced-sampling draws each of them makes.
"""

import numpy as np

PURPOSES = {
    "params": 0,
    "contexts": 1,
    "noise": 2,
    "forced": 3,
    "shuffle": 4,
}


def substream(seed: int, purpose: str) -> np.random.Generator:
    try:
        key = PURPOSES[purpose]
    except KeyError:
        raise ValueError(f"unknown rng purpose {purpose!r}") from None
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, key]))
