"""Counter-based, stream-addressed random number generation."""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

# Stream prefixes, one per consumer
DISORDER_STREAM = 0
RESAMPLE_STREAM = 1
PFREE_STREAM = 2
CONFIG_STREAM = 3

class SeedRecord(BaseModel):
    """Master seed plus the spawn key addressing one independent stream"""
    model_config = ConfigDict(frozen=True)

    seed: int = Field(..., ge=0, lt=2**64)
    stream: Tuple[int, ...] = ()

    def child(self, *key: int) -> "SeedRecord":
        return SeedRecord(seed=self.seed, stream=self.stream + tuple(int(k) for k in key))

def make_rng(record: SeedRecord) -> np.random.Generator:
    """Philox generator for the given seed record; bit-reproducible"""
    sequence = np.random.SeedSequence(record.seed, spawn_key=record.stream)
    return np.random.Generator(np.random.Philox(sequence))

def as_seed_record(seed, *stream: int) -> SeedRecord:
    """Accept an int or an existing record"""
    if isinstance(seed, SeedRecord):
        return seed.child(*stream) if stream else seed
    return SeedRecord(seed=int(seed), stream=tuple(int(k) for k in stream))
