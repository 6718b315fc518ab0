from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from rslab.utils.rng import SeedRecord
from rslab.utils.validators import InvalidArgumentError

@dataclass(frozen=True)
class Disorder:
    """Coupling matrix g with zero diagonal and the seed record that produced it"""
    g: np.ndarray
    seed: Optional[SeedRecord] = field(default=None)

    def __post_init__(self):
        self.g.setflags(write=False)

    @property
    def N(self) -> int:
        return int(self.g.shape[0])

    @cached_property
    def gbar(self) -> np.ndarray:
        """Symmetrization (g + g^T) / sqrt(2)"""
        sym = (self.g + self.g.T) / np.sqrt(2.0)
        sym.setflags(write=False)
        return sym

    @classmethod
    def from_matrix(cls, g, seed: Optional[SeedRecord] = None) -> "Disorder":
        matrix = np.array(g, dtype=np.float64, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidArgumentError(f"Coupling matrix must be square: {matrix.shape}")
        return cls(g=matrix, seed=seed)
