"""Counter-based random stream derivation.

Every random stream in the library is a pure function of a tuple of
non-negative integers: a user-facing seed, a domain tag, and zero or
more indices (iteration, learner, trial).  Two call sites that build a
stream from the same tuple get bit-identical draws; streams built from
different tuples are statistically independent.  This is what makes
simulated trajectories replayable and lets a sweep add cells without
perturbing the streams of existing ones.
"""

from __future__ import annotations

import numpy as np

# Domain tags.  Fixed forever: changing one silently reseeds every
# consumer, which breaks replay of recorded runs.
TAG_GRADIENT = 0     # minibatch sampling / gradient noise, indexed (iteration, learner)
TAG_PERMUTATION = 1  # shared ring permutation, indexed (iteration,)
TAG_CLOCK = 2        # compute-time draws, indexed (iteration,)
TAG_INIT = 3         # initial weights, no index
TAG_TRIAL = 4        # Monte-Carlo trial streams, indexed (trial,)
TAG_CELL = 5         # sweep cell seeds, indexed (strategy_id, n_learners, trial)
TAG_DATA = 6         # oracle-owned randomness (datasets, drawn optima), no index


def seed_sequence(*entropy: int) -> np.random.SeedSequence:
    """SeedSequence for an entropy tuple of non-negative integers."""
    for part in entropy:
        if part < 0:
            raise ValueError(f"entropy components must be >= 0, got {part}")
    return np.random.SeedSequence(entropy)


def stream(*entropy: int) -> np.random.Generator:
    """Fresh Generator for an entropy tuple.  Pure: same tuple, same draws."""
    return np.random.default_rng(seed_sequence(*entropy))
