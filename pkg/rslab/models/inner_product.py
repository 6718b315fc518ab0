from dataclasses import dataclass

import numpy as np

@dataclass(frozen=True)
class NormalizedInnerProduct:
    """<x, y> = N^-1 sum x_i y_i on R^N and the matching tensor (x (x) y) z = <y, z> x

    Matrices act on vectors by the plain matrix-vector product.
    """
    N: int

    def inner(self, x: np.ndarray, y: np.ndarray):
        """Contract the last axes; stacked vectors give arrays of inner products"""
        return np.inner(x, y) / self.N

    def norm(self, x: np.ndarray) -> float:
        return float(np.sqrt(np.inner(x, x) / self.N))

    def tensor(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.outer(x, y) / self.N

    def form(self, x: np.ndarray, matrix: np.ndarray, y: np.ndarray) -> float:
        """<x, A y>"""
        return float(x @ (matrix @ y)) / self.N

    def ones(self) -> np.ndarray:
        return np.ones(self.N)
