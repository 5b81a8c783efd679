"""
Deterministic random streams with derivable substreams.

A stream is identified by a seed and a tuple of integer tags. Splitting appends
a tag; the numpy generator of a stream is Philox keyed by
SeedSequence(seed, spawn_key=tags), so any substream can be rebuilt without
drawing from its parent.
"""

from typing import Tuple

import numpy as np

from src.app.models.traces import RngLineage


class StreamKey:
    """Seed plus tag path of one random stream."""

    def __init__(self, seed: int, tags: Tuple[int, ...] = ()) -> None:
        if seed < 0:
            raise ValueError(f"seed must be >= 0, got {seed}")
        self.seed = int(seed)
        self.tags = tuple(int(t) for t in tags)

    def split(self, *tags: int) -> "StreamKey":
        """Key of a named substream."""
        return StreamKey(self.seed, self.tags + tuple(tags))

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.tags)
        return np.random.Generator(np.random.Philox(sequence))

    def __repr__(self) -> str:
        return f"StreamKey(seed={self.seed}, tags={self.tags})"


def replica_key(lineage: RngLineage) -> StreamKey:
    return StreamKey(lineage.seed, lineage.stream).split(lineage.replica)


def chunk_generator(lineage: RngLineage, level: int, chunk: int) -> np.random.Generator:
    """Generator of output chunk `chunk` of the step producing `level`."""
    return replica_key(lineage).split(level, chunk).generator()
