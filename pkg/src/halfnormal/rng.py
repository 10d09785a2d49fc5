"""Seed handling and reproducible stream derivation.

All randomness in the package flows through ``derive_generator``: a master
64-bit seed plus a tuple of small integers (experiment id, cell index,
replication index, batch index, stream tag) is fed to
``numpy.random.SeedSequence``, which drives a PCG64 bit generator.  Two
calls with the same path always yield the same stream, independently of
execution order, so replications and batches can run in parallel with
results identical to a serial run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngSeed", "derive_generator"]


@dataclass(frozen=True)
class RngSeed:
    """A 64-bit unsigned master seed."""

    seed: int

    def __post_init__(self) -> None:
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise TypeError(f"seed must be an int, got {type(self.seed).__name__}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be in [0, 2**64), got {self.seed}")


def _as_seed_int(seed: RngSeed | int) -> int:
    if isinstance(seed, RngSeed):
        return seed.seed
    return RngSeed(seed).seed


def derive_generator(seed: RngSeed | int, *path: int) -> np.random.Generator:
    """Return a PCG64 generator for the stream identified by ``(seed, *path)``."""
    entropy = (_as_seed_int(seed),) + tuple(int(p) for p in path)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
