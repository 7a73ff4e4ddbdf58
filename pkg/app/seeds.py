"""
Counter-based seed splitting: one run seed expands into reproducible per-trial seeds.
"""
from dataclasses import dataclass
from typing import List

import numpy as np


@dataclass(frozen=True)
class SeedSplitter:
    """
    Derive child seeds from a root seed and integer counters.

    A child seed depends only on (root, stream, index), so any single trial
    can be replayed without running the ones before it.

    Example:
        splitter = SeedSplitter(7)
        seed = splitter.seed(stream=2, index=41)
        rng = splitter.rng(stream=2, index=41)
    """

    root: int

    def seed(self, stream: int, index: int) -> int:
        sequence = np.random.SeedSequence(entropy=self.root, spawn_key=(stream, index))
        return int(sequence.generate_state(1, dtype=np.uint32)[0])

    def seeds(self, stream: int, count: int) -> List[int]:
        return [self.seed(stream, i) for i in range(count)]

    def rng(self, stream: int, index: int) -> np.random.Generator:
        return np.random.default_rng(self.seed(stream, index))
