"""Deterministic RNG stream derivation.

Splitting rule: every worker / task stream is constructed as
``np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))``
where ``key`` is a tuple of small integers identifying the task
(experiment index, grid-point index, replica index, ...).  Identical
master seed and key always reproduce the identical stream, independent
of how many other streams exist or in which order they are used.
"""

from __future__ import annotations

import numpy as np


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """PCG64 stream for task ``key`` under ``master_seed``."""
    if not 0 <= int(master_seed) < 2 ** 64:
        raise ValueError("master seed must be an unsigned 64-bit integer")
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(seq)
