from dataclasses import dataclass

import numpy as np

@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for a standard Gaussian; weights sum to 1"""
    nodes: np.ndarray
    weights: np.ndarray
    requested_order: int = 0  # before underflowed tail nodes were dropped

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def order(self) -> int:
        return self.requested_order or int(self.nodes.size)

    def average(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        """Weighted average of samples evaluated at the nodes along ``axis``"""
        return np.tensordot(np.moveaxis(values, axis, -1), self.weights, axes=([-1], [0]))

@dataclass(frozen=True)
class TensorRule:
    """Product rule for a d-dimensional standard Gaussian"""
    nodes: np.ndarray  # shape (n**d, d)
    weights: np.ndarray  # shape (n**d,)

    @property
    def dim(self) -> int:
        return int(self.nodes.shape[1])
