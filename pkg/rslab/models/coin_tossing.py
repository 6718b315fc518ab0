from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import expit

def log_two_cosh(x: np.ndarray) -> np.ndarray:
    """log(2 cosh x) without overflow"""
    return np.logaddexp(x, -x)

@dataclass(frozen=True)
class PFreeMeasure:
    """Product measure p(sigma) = prod_i exp(h_i sigma_i) / (2 cosh h_i) on {-1, 1}^N"""
    field: np.ndarray

    def __post_init__(self):
        array = np.ascontiguousarray(self.field, dtype=np.float64)
        array.setflags(write=False)
        object.__setattr__(self, "field", array)

    @property
    def N(self) -> int:
        return int(self.field.size)

    @cached_property
    def log_normalizer(self) -> float:
        return float(np.sum(log_two_cosh(self.field)))

    def log_prob(self, sigma: np.ndarray) -> np.ndarray:
        """Log-probability of one configuration or a stack of configurations"""
        return np.asarray(sigma, dtype=np.float64) @ self.field - self.log_normalizer

    def mean(self) -> np.ndarray:
        return np.tanh(self.field)

    def up_probability(self) -> np.ndarray:
        """P(sigma_i = +1) = e^h / (2 cosh h), computed as a logistic"""
        return expit(2.0 * self.field)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Independent configurations, shape (size, N)"""
        uniforms = rng.random((size, self.N))
        return np.where(uniforms < self.up_probability(), 1.0, -1.0)
