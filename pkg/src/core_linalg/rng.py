"""
Seeded, splittable random streams.

Each stream is a Philox counter-based generator keyed by a SeedSequence built from
(seed, stream-id), so parallel trials draw independent, reproducible sequences.
"""

from dataclasses import dataclass, field

import numpy as np

from src.errors import DimensionMismatch

_U64 = (1 << 64) - 1


@dataclass
class RngStream:
    """A single-consumer random stream identified by (seed, stream_id)."""
    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0 <= self.seed <= _U64 and 0 <= self.stream_id <= _U64):
            raise ValueError(f"seed and stream_id must be 64-bit unsigned, got ({self.seed}, {self.stream_id})")
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self.generator.uniform(low, high, size)

    def integers(self, low: int, high: int, size=None):
        return self.generator.integers(low, high, size)

    def choice(self, population: int, size: int, replace: bool = False) -> np.ndarray:
        return self.generator.choice(population, size=size, replace=replace)


def sample_gaussian(rng: RngStream, length: int) -> np.ndarray:
    """I.i.d. standard normal vector of the given length."""
    if length < 1:
        raise DimensionMismatch(f"sample length must be >= 1, got {length}")
    return rng.generator.standard_normal(length)


def trial_stream(seed: int, point_index: int, trial_index: int) -> RngStream:
    """Stream for one Monte-Carlo trial: the sweep point in the high word, the trial in the low word."""
    return RngStream(seed, (point_index << 32) | trial_index)
