"""Deterministic scalar theory: overlap fixed point, state evolution, phase conditions."""

import logging
from typing import Optional

import numpy as np
from scipy.optimize import bisect

from rslab.config import settings
from rslab.models.coin_tossing import log_two_cosh
from rslab.models.quadrature import QuadratureRule
from rslab.schemas.params import ModelParams
from rslab.schemas.reports import (
    ConvergenceCheck,
    OverlapFixedPoint,
    Provenance,
    SolverMethod,
    StateEvolutionTable,
)
from rslab.services.quadrature import (
    default_rule,
    escalate_field_rule,
    expect_field,
    field_convergence,
    psi,
)
from rslab.utils.validators import (
    ConvergenceError,
    InvalidArgumentError,
    validate_unit_interval,
)

logger = logging.getLogger(__name__)

# Lower end of the bisection bracket; excludes the trivial root at h = 0
Q_FLOOR = 1e-16
CONSISTENCY_TOLERANCE = 1e-9

def _tanh2(x):
    return np.tanh(x) ** 2

def _sech2(x):
    return np.cosh(x) ** -2.0

def _sech4(x):
    return np.cosh(x) ** -4.0

def _log_cosh(x):
    return log_two_cosh(x) - np.log(2.0)

def _accuracy(check: ConvergenceCheck) -> dict:
    return dict(quad_order=check.order, quad_delta=check.delta, quad_converged=check.converged)

def overlap_map(q: float, params: ModelParams, rule: Optional[QuadratureRule] = None) -> float:
    """Right side of the fixed-point equation, E tanh^2(beta sqrt(q) Z + h)"""
    return expect_field(_tanh2, params, q, rule)

def solve_q(params: ModelParams, tol: Optional[float] = None,
            rule: Optional[QuadratureRule] = None) -> OverlapFixedPoint:
    """Largest solution of q = E tanh^2(beta sqrt(q) Z + h) in [0, 1]

    Without an explicit rule the order is doubled from the default until the
    overlap integrand at the root is stable to ``quad_check_tolerance``. The
    outcome of that check is recorded in the provenance either way.
    """
    tol = settings.q_tolerance if tol is None else tol
    if tol < 1e-14:
        raise InvalidArgumentError(f"Solver tolerance must be at least 1e-14: {tol}")
    if rule is not None:
        report = _solve_at(params, tol, rule)
        check = field_convergence(_tanh2, params, report.q, rule.order)
        if not check.converged:
            logger.debug(f"Overlap integrand not converged at order {check.order}: |delta|={check.delta:.3e}")
    else:
        rule = default_rule()
        while True:
            report = _solve_at(params, tol, rule)
            escalated, check = escalate_field_rule(_tanh2, params, report.q, rule.order)
            if escalated.order <= rule.order:
                break
            logger.info(f"Re-solving q at quadrature order {escalated.order} (beta={params.beta}, h={params.h})")
            rule = escalated

    provenance = Provenance(quad_order=rule.order, quad_delta=check.delta,
                            quad_converged=check.converged)
    return report.model_copy(update={"provenance": provenance})

def _solve_at(params: ModelParams, tol: float, rule: QuadratureRule) -> OverlapFixedPoint:
    def result(q, iterations, method):
        residual = abs(overlap_map(q, params, rule) - q)
        return OverlapFixedPoint(
            params=params, q=q, residual=residual, iterations=iterations, method=method,
        )

    if params.beta == 0.0:
        return result(float(np.tanh(params.h) ** 2), 0, SolverMethod.DIRECT)
    if params.h == 0.0 and params.beta <= 1.0:
        return result(0.0, 0, SolverMethod.DIRECT)

    # Damped iteration from q = 1 decreases monotonically to the largest root
    damping = settings.q_damping
    q = 1.0
    previous_sign = 0.0
    for iteration in range(1, settings.q_max_damped_iterations + 1):
        gap = overlap_map(q, params, rule) - q
        if abs(gap) <= tol:
            return result(q, iteration, SolverMethod.DAMPED_ITERATION)
        sign = np.sign(gap)
        if previous_sign and sign != previous_sign:
            logger.info(f"Oscillation in damped iteration at q={q:.6g}; switching to bisection")
            break
        previous_sign = sign
        q = min(max(q + damping * gap, 0.0), 1.0)
    else:
        logger.info(f"Damped iteration stalled at q={q:.6g} (beta={params.beta}, h={params.h}); "
                    f"switching to bisection")

    def gap_fn(x):
        return overlap_map(x, params, rule) - x

    upper_gap = gap_fn(1.0)
    if upper_gap >= 0.0:
        return result(1.0, settings.q_max_damped_iterations, SolverMethod.BISECTION)
    try:
        root, info = bisect(gap_fn, Q_FLOOR, 1.0, xtol=1e-17, rtol=1e-15,
                            maxiter=settings.q_max_bisection_iterations,
                            full_output=True, disp=False)
    except ValueError as e:
        raise ConvergenceError(f"Fixed point not bracketed: {e}", last_iterate=q) from e

    report = result(float(root), info.iterations, SolverMethod.BISECTION)
    if report.residual > tol:
        raise ConvergenceError(
            f"Fixed-point residual {report.residual:.3e} exceeds tolerance {tol:.1e}",
            last_iterate=float(root),
        )
    return report

def check_consistency(params: ModelParams, q: float,
                      rule: Optional[QuadratureRule] = None) -> float:
    """Raise unless q solves the fixed-point equation"""
    validate_unit_interval(q, "q")
    residual = abs(overlap_map(q, params, rule) - q)
    if residual > CONSISTENCY_TOLERANCE:
        raise InvalidArgumentError(
            f"q={q} is not a fixed point for beta={params.beta}, h={params.h} (residual {residual:.3e})"
        )
    return q

def state_evolution(params: ModelParams, q: float, K: int,
                    rule: Optional[QuadratureRule] = None) -> StateEvolutionTable:
    """alpha_k = psi(alpha_{k-1}), gamma_k = (alpha_k - G_{k-1}) / sqrt(q - G_{k-1}), G_k = sum gamma_j^2"""
    if K < 1:
        raise InvalidArgumentError(f"Depth K must be at least 1: {K}")
    rule = rule or default_rule()
    check_consistency(params, q, rule)

    gamma1 = expect_field(np.tanh, params, q, rule)
    alpha = [np.sqrt(q) * gamma1]
    gamma = [gamma1]
    gamma2cum = [gamma1 ** 2]
    terminated = False

    for k in range(2, K + 1):
        previous = gamma2cum[-1]
        remaining = q - previous
        if remaining < settings.se_gap_floor:
            terminated = True
            break
        alpha_k = psi(min(alpha[-1], q), q, params, rule)
        # Past numerical saturation the strict ordering is lost to rounding
        if not (previous < alpha_k < q) or alpha_k < alpha[-1]:
            terminated = True
            break
        gamma_k = (alpha_k - previous) / np.sqrt(remaining)
        alpha.append(alpha_k)
        gamma.append(gamma_k)
        gamma2cum.append(previous + gamma_k ** 2)

    if terminated:
        logger.debug(f"State evolution saturated at depth {len(alpha)} of {K} "
                     f"(q - Gamma^2 = {q - gamma2cum[-1]:.3e})")

    return StateEvolutionTable(
        params=params,
        q=q,
        requested_depth=K,
        K=len(alpha),
        alpha=[float(a) for a in alpha],
        gamma=[float(g) for g in gamma],
        gamma2cum=[float(g) for g in gamma2cum],
        terminated_early=terminated,
        provenance=Provenance(**_accuracy(field_convergence(np.tanh, params, q, rule.order))),
    )

def at_value(params: ModelParams, q: float, rule: Optional[QuadratureRule] = None) -> float:
    """beta^2 E sech^4(beta sqrt(q) Z + h); below one inside the AT region"""
    rule = rule or escalate_field_rule(_sech4, params, q)[0]
    return params.beta ** 2 * expect_field(_sech4, params, q, rule)

def tech_value(params: ModelParams, q: float, rule: Optional[QuadratureRule] = None) -> float:
    """beta^2 E sech^2(beta sqrt(q) Z + h); at most one where the RS formula is proven"""
    rule = rule or escalate_field_rule(_sech2, params, q)[0]
    return params.beta ** 2 * expect_field(_sech2, params, q, rule)

def rs_free_energy(params: ModelParams, q: float, rule: Optional[QuadratureRule] = None) -> float:
    """log 2 + E log cosh(beta sqrt(q) Z + h) + beta^2 (1 - q)^2 / 4"""
    rule = rule or escalate_field_rule(_log_cosh, params, q)[0]
    log_cosh = expect_field(_log_cosh, params, q, rule)
    return float(np.log(2.0) + log_cosh + params.beta ** 2 * (1.0 - q) ** 2 / 4.0)
