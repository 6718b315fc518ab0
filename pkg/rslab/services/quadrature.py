"""Gauss-Hermite expectations under a standard Gaussian, including the map psi."""

import logging
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import roots_hermitenorm

from rslab.config import settings
from rslab.models.quadrature import QuadratureRule, TensorRule
from rslab.schemas.params import ModelParams
from rslab.schemas.reports import ConvergenceCheck
from rslab.utils.validators import (
    InvalidArgumentError,
    NumericError,
    validate_int_range,
)

logger = logging.getLogger(__name__)

MAX_ORDER = 512

@lru_cache(maxsize=64)
def gauss_hermite_rule(order: int) -> QuadratureRule:
    """Probabilists' Gauss-Hermite rule with weights summing to one"""
    validate_int_range(order, 1, MAX_ORDER, "Quadrature order")

    nodes, weights = roots_hermitenorm(order)
    # Mirror-average so the rule is symmetric to rounding
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])

    # Far-tail weights underflow at high order; they carry no mass
    keep = weights > 0.0
    if not np.all(keep):
        logger.debug(f"Dropping {np.count_nonzero(~keep)} underflowed nodes at order {order}")
        nodes, weights = nodes[keep], weights[keep]

    weights = weights / weights.sum()
    return QuadratureRule(nodes=np.ascontiguousarray(nodes), weights=np.ascontiguousarray(weights),
                          requested_order=order)

def default_rule() -> QuadratureRule:
    return gauss_hermite_rule(settings.quad_order)

@lru_cache(maxsize=8)
def tensor_rule(dim: int, order: int) -> TensorRule:
    """Product rule for a dim-dimensional standard Gaussian"""
    validate_int_range(dim, 1, 4, "Tensor dimension")
    base = gauss_hermite_rule(order)
    nodes = np.stack(np.meshgrid(*[base.nodes] * dim, indexing="ij"), axis=-1).reshape(-1, dim)
    weights = np.stack(np.meshgrid(*[base.weights] * dim, indexing="ij"), axis=-1).reshape(-1, dim)
    return TensorRule(nodes=nodes, weights=weights.prod(axis=1))

def _evaluate(f: Callable, nodes: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(f(nodes), dtype=np.float64)
    except TypeError:
        values = None
    if values is None or values.shape != nodes.shape:
        # Scalar-only callable
        values = np.array([f(float(z)) for z in nodes], dtype=np.float64)
    bad = ~np.isfinite(values)
    if np.any(bad):
        node = float(nodes[np.argmax(bad)])
        raise NumericError(f"Integrand is not finite at node {node}", node=node)
    return values

def expect1(f: Callable, rule: Optional[QuadratureRule] = None) -> float:
    """E f(Z) as the weighted sum over the rule"""
    rule = rule or default_rule()
    return float(rule.weights @ _evaluate(f, rule.nodes))

def expect_field(f: Callable, params: ModelParams, q: float,
                 rule: Optional[QuadratureRule] = None) -> float:
    """E f(beta sqrt(q) Z + h)"""
    scale = params.beta * np.sqrt(max(q, 0.0))
    return expect1(lambda z: f(scale * z + params.h), rule)

def _check_psi_args(t: float, q: float) -> float:
    if not (0.0 <= q <= 1.0):
        raise InvalidArgumentError(f"q must be between 0 and 1: {q}")
    if t < 0.0 or t > q:
        raise InvalidArgumentError(f"t must be between 0 and q={q}: {t}")
    return t

def psi(t: float, q: float, params: ModelParams,
        rule: Optional[QuadratureRule] = None) -> float:
    """E tanh(b sqrt(t) Z + b sqrt(q-t) Z' + h) tanh(b sqrt(t) Z + b sqrt(q-t) Z'' + h)

    Given Z the two factors are independent, so this is E_Z[(E_Z' tanh(...))^2].
    """
    _check_psi_args(t, q)
    rule = rule or default_rule()
    shared = params.beta * np.sqrt(t) * rule.nodes
    private = params.beta * np.sqrt(q - t) * rule.nodes
    inner = np.tanh(shared[:, None] + private[None, :] + params.h) @ rule.weights
    value = float(rule.weights @ inner ** 2)
    if not np.isfinite(value):
        raise NumericError(f"psi is not finite at t={t}")
    return value

def psi_tensor(t: float, q: float, params: ModelParams, order: int = 101) -> float:
    """psi by a three-dimensional product rule; reference for the nested evaluation"""
    _check_psi_args(t, q)
    rule = tensor_rule(3, order)
    z, z1, z2 = rule.nodes.T
    shared = params.beta * np.sqrt(t) * z + params.h
    spread = params.beta * np.sqrt(q - t)
    return float(rule.weights @ (np.tanh(shared + spread * z1) * np.tanh(shared + spread * z2)))

def _compare(f: Callable, order: int, tolerance: float) -> ConvergenceCheck:
    refined_order = min(2 * order, MAX_ORDER)
    value = expect1(f, gauss_hermite_rule(order))
    refined = expect1(f, gauss_hermite_rule(refined_order))
    delta = abs(refined - value)
    return ConvergenceCheck(
        value=value,
        refined=refined,
        delta=delta,
        order=order,
        refined_order=refined_order,
        # An order that cannot be doubled is never reported as converged
        converged=bool(delta < tolerance and refined_order > order),
    )

def check_convergence(f: Callable, order: Optional[int] = None,
                      tolerance: Optional[float] = None) -> ConvergenceCheck:
    """Compare E f(Z) at ``order`` and at twice the order"""
    order = order or settings.quad_order
    tolerance = settings.quad_check_tolerance if tolerance is None else tolerance
    check = _compare(f, order, tolerance)
    if not check.converged:
        logger.warning(f"Quadrature not converged at order {order}: |delta|={check.delta:.3e}")
    return check

def field_convergence(f: Callable, params: ModelParams, q: float,
                      order: Optional[int] = None,
                      tolerance: Optional[float] = None) -> ConvergenceCheck:
    """Doubling check for E f(beta sqrt(q) Z + h); silent, the caller records the outcome"""
    order = order or settings.quad_order
    tolerance = settings.quad_check_tolerance if tolerance is None else tolerance
    scale = params.beta * np.sqrt(max(q, 0.0))
    return _compare(lambda z: f(scale * z + params.h), order, tolerance)

def escalate_field_rule(f: Callable, params: ModelParams, q: float,
                        order: Optional[int] = None,
                        tolerance: Optional[float] = None) -> Tuple[QuadratureRule, ConvergenceCheck]:
    """Double the order until E f(beta sqrt(q) Z + h) is stable to ``tolerance``.

    Returns the first rule whose doubled counterpart agrees with it, or the
    finest admissible rule together with the failed check.
    """
    order = order or settings.quad_order
    tolerance = settings.quad_check_tolerance if tolerance is None else tolerance
    scale = params.beta * np.sqrt(max(q, 0.0))
    field = lambda z: f(scale * z + params.h)

    check = _compare(field, order, tolerance)
    while not check.converged and check.refined_order < MAX_ORDER:
        logger.debug(f"Raising quadrature order {check.order} -> {check.refined_order} "
                     f"(|delta|={check.delta:.3e})")
        check = _compare(field, check.refined_order, tolerance)
    if not check.converged:
        logger.warning(f"Quadrature not converged at order {check.order}: |delta|={check.delta:.3e}")
        return gauss_hermite_rule(check.refined_order), check
    return gauss_hermite_rule(check.order), check
