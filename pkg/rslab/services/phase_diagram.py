"""Phase boundaries in the (T, h) plane: the AT line and the stronger RS condition."""

import logging
from decimal import Decimal, InvalidOperation
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import bisect

from rslab.config import settings
from rslab.models.quadrature import QuadratureRule
from rslab.schemas.params import ModelParams
from rslab.schemas.reports import PhaseCurve, PhasePoint, Provenance, RegionKind
from rslab.services.quadrature import gauss_hermite_rule
from rslab.services.scalar_theory import at_value, solve_q, tech_value
from rslab.utils.logger import LoggerMixin
from rslab.utils.validators import (
    BracketError,
    IdentityViolation,
    InvalidArgumentError,
    validate_grid,
    validate_positive,
)

logger = logging.getLogger(__name__)

class PhaseDiagramEngine(LoggerMixin):
    """Critical inverse temperatures of both conditions at a fixed quadrature order"""

    def __init__(self, order: Optional[int] = None, tol: Optional[float] = None,
                 threads: Optional[int] = None):
        self.order = order or settings.phase_quad_order
        self.tol = validate_positive(settings.phase_tolerance if tol is None else tol, "tol")
        self.threads = threads or settings.threads
        self.rule = gauss_hermite_rule(self.order)
        self.conditions: Dict[str, Callable] = {
            "at": at_value,
            "tech": tech_value,
        }

    def condition_gap(self, kind: str, beta: float, h: float) -> float:
        """condition value minus one, with q re-solved at (beta, h)"""
        if kind not in self.conditions:
            raise InvalidArgumentError(f"Unknown condition: {kind}")
        params = ModelParams(beta=beta, h=h)
        q = solve_q(params, rule=self.rule).q
        return self.conditions[kind](params, q, self.rule) - 1.0

    def critical_beta(self, kind: str, h: float) -> Tuple[float, float]:
        """Root in beta of the condition on [0, beta_max], with the overlap there"""
        lower, upper = 0.0, settings.phase_beta_max
        gap = lambda beta: self.condition_gap(kind, beta, h)
        f_lower, f_upper = gap(lower), gap(upper)
        if f_lower * f_upper > 0:
            raise BracketError(
                f"{kind} condition not bracketed at h={h}: f({lower})={f_lower:.3e}, f({upper})={f_upper:.3e}",
                lower=lower, upper=upper, f_lower=f_lower, f_upper=f_upper,
            )
        root = bisect(gap, lower, upper, xtol=self.tol)
        q = solve_q(ModelParams(beta=root, h=h), rule=self.rule).q
        return float(root), float(q)

    def dense_grid_root(self, kind: str, h: float, lower: float, upper: float, step: float) -> float:
        """Midpoint of the first sign change of the condition on a uniform beta grid"""
        grid = np.arange(lower, upper + 0.5 * step, step)
        previous = self.condition_gap(kind, grid[0], h)
        for left, right in zip(grid[:-1], grid[1:]):
            current = self.condition_gap(kind, right, h)
            if previous * current <= 0:
                return float(0.5 * (left + right))
            previous = current
        raise BracketError(f"No sign change of the {kind} condition on [{lower}, {upper}] at h={h}",
                           lower=lower, upper=upper)

    def phase_point(self, h: float) -> PhasePoint:
        beta_at, q_at = self.critical_beta("at", h)
        beta_tech, q_tech = self.critical_beta("tech", h)
        if beta_tech > beta_at + self.tol:
            raise IdentityViolation(f"beta_tech={beta_tech} exceeds beta_at={beta_at} at h={h}")
        return PhasePoint(h=h, beta_at=beta_at, beta_tech=beta_tech, q_at=q_at, q_tech=q_tech)

    def scan(self, h_grid: Sequence[float]) -> PhaseCurve:
        grid = validate_grid(h_grid, "h grid")
        self.logger.info(f"Scanning {len(grid)} field values at quadrature order {self.order}")
        points: List[PhasePoint] = Parallel(n_jobs=self.threads)(
            delayed(self.phase_point)(h) for h in grid
        )
        return PhaseCurve(tol=self.tol, points=list(points), provenance=Provenance(quad_order=self.order))

def boundary_scan(h_grid: Sequence[float], tol: Optional[float] = None,
                  threads: Optional[int] = None, order: Optional[int] = None) -> PhaseCurve:
    """Critical inverse temperatures of both conditions for every h on the grid"""
    return PhaseDiagramEngine(order, tol, threads).scan(h_grid)

def region_classify(params: ModelParams, rule: Optional[QuadratureRule] = None) -> RegionKind:
    """TechRegion when the stronger condition holds (boundary included), ATOnlyRegion
    when only the AT condition holds, BeyondAT otherwise"""
    q = solve_q(params, rule=rule).q
    if tech_value(params, q, rule) <= 1.0:
        return RegionKind.TECH_REGION
    if at_value(params, q, rule) < 1.0:
        return RegionKind.AT_ONLY_REGION
    return RegionKind.BEYOND_AT

def _decimals(text: str) -> int:
    try:
        exponent = Decimal(text.strip()).as_tuple().exponent
    except InvalidOperation:
        return 0
    return max(-exponent, 0) if isinstance(exponent, int) else 0

def parse_grid(text: str) -> List[float]:
    """'start:stop:step' (stop inclusive within half a step) or a comma-separated list"""
    if ":" in text:
        parts = text.split(":")
        try:
            start, stop, step = (float(part) for part in parts)
        except ValueError as e:
            raise InvalidArgumentError(f"Grid must be start:stop:step: {text}") from e
        validate_positive(step, "grid step")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        # Points carry the precision of start and step, not the float error of the product
        decimals = max(_decimals(parts[0]), _decimals(parts[2]))
        points = np.round(start + step * np.arange(max(count, 0)), decimals)
        return [float(x) for x in points]
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InvalidArgumentError(f"Grid values must be numbers: {text}") from e
