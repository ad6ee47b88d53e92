"""Deterministic derivation of named random streams from a master seed."""

from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.SeedSequence"


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def child(seed, *key: int) -> np.random.SeedSequence:
    """A named substream: same (seed, key) always yields the same stream."""
    base = as_seed_sequence(seed)
    return np.random.SeedSequence(entropy=base.entropy,
                                  spawn_key=base.spawn_key + tuple(int(k) for k in key))


def rng(seed, *key: int) -> np.random.Generator:
    return np.random.default_rng(child(seed, *key) if key else as_seed_sequence(seed))
