from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from rslab.models.disorder import Disorder
from rslab.models.inner_product import NormalizedInnerProduct
from rslab.schemas.params import ModelParams
from rslab.schemas.reports import StateEvolutionTable

def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=np.float64)
    array.setflags(write=False)
    return array

@dataclass(frozen=True)
class RankOneFactors:
    """Factors of rho^(s) = a (x) phi + phi (x) b - c phi (x) phi, one row per step s"""
    a: np.ndarray  # g^(s) phi^(s)
    b: np.ndarray  # (g^(s))^T phi^(s)
    c: np.ndarray  # <g^(s) phi^(s), phi^(s)>

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

@dataclass(frozen=True)
class TapState:
    """One realization of the iterative TAP construction at depth k

    Rows are indexed from step 1: ``phi[s - 1]`` is phi^(s), ``m[s - 1]`` is m^(s).
    """
    params: ModelParams
    q: float
    disorder: Disorder
    phi: np.ndarray  # (k, N)
    m: np.ndarray  # (k + 1, N)
    zeta: np.ndarray  # (k, N)
    hfield: np.ndarray  # h^(k+1)
    gmod: np.ndarray  # g^(k+1)
    factors: RankOneFactors
    se: StateEvolutionTable

    def __post_init__(self):
        for name in ("phi", "m", "zeta", "hfield", "gmod"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def N(self) -> int:
        return self.disorder.N

    @property
    def k(self) -> int:
        return int(self.phi.shape[0])

    @cached_property
    def ip(self) -> NormalizedInnerProduct:
        return NormalizedInnerProduct(self.N)

    @property
    def magnetization(self) -> np.ndarray:
        """m^(k+1)"""
        return self.m[-1]

    @cached_property
    def gmod_bar(self) -> np.ndarray:
        return _frozen((self.gmod + self.gmod.T) / np.sqrt(2.0))

    @cached_property
    def gamma_used(self) -> np.ndarray:
        """Coefficients of zeta^(1..k) in the cavity field, divided by beta"""
        coeffs = [self.se.gamma_at(s) for s in range(1, self.k)]
        coeffs.append(self.se.remaining(self.k - 1))
        return np.array(coeffs)

    @cached_property
    def gamma(self) -> np.ndarray:
        """gamma_1..gamma_k from the state-evolution table"""
        return np.array([self.se.gamma_at(s) for s in range(1, self.k + 1)])

    def centers(self) -> np.ndarray:
        """<m^(k+1), phi^(s)> for s = 1..k"""
        return self.ip.inner(self.phi, self.magnetization)

    def rho(self, s: int) -> np.ndarray:
        """Dense rho^(s)"""
        f, phi, ip = self.factors, self.phi[s - 1], self.ip
        return ip.tensor(f.a[s - 1], phi) + ip.tensor(phi, f.b[s - 1]) - f.c[s - 1] * ip.tensor(phi, phi)

    def rho_bar(self, s: int) -> np.ndarray:
        """Dense symmetrized rho^(s), built from zeta^(s) and phi^(s)"""
        zeta, phi, ip = self.zeta[s - 1], self.phi[s - 1], self.ip
        return (ip.tensor(zeta, phi) + ip.tensor(phi, zeta)
                - ip.inner(zeta, phi) * ip.tensor(phi, phi))

    def modified_matrix(self, s: int) -> np.ndarray:
        """g^(s) = g - sum_{t<s} rho^(t); s = k + 1 returns a copy of the stored matrix"""
        if s == self.k + 1:
            return np.array(self.gmod)
        matrix = np.array(self.disorder.g)
        for t in range(1, s):
            matrix -= self.rho(t)
        return matrix

    def projector(self, depth: Optional[int] = None) -> np.ndarray:
        """P = sum_{s<=depth} phi^(s) (x) phi^(s)"""
        depth = self.k if depth is None else depth
        basis = self.phi[:depth]
        return basis.T @ basis / self.N

    def complement(self, depth: Optional[int] = None) -> np.ndarray:
        """Q = 1 - P"""
        return np.eye(self.N) - self.projector(depth)
