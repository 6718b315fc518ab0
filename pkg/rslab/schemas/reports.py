import enum
import json
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import scipy
from pydantic import BaseModel, ConfigDict, Field

from rslab import __version__
from rslab.schemas.params import ModelParams

SCHEMA_VERSION = "1.0"

class SolverMethod(str, enum.Enum):
    DIRECT = "direct"
    DAMPED_ITERATION = "damped-iteration"
    BISECTION = "bisection"

class RegionKind(str, enum.Enum):
    TECH_REGION = "TechRegion"
    AT_ONLY_REGION = "ATOnlyRegion"
    BEYOND_AT = "BeyondAT"

class ReportBase(BaseModel):
    # -inf is a legitimate log-mass; keep it representable in JSON
    model_config = ConfigDict(ser_json_inf_nan="constants")

class Provenance(ReportBase):
    package_version: str = __version__
    numpy_version: str = np.__version__
    scipy_version: str = scipy.__version__
    seed: Optional[int] = None
    stream: Tuple[int, ...] = ()
    N: Optional[int] = None
    k: Optional[int] = None
    epsilon: Optional[float] = None
    quad_order: Optional[int] = None
    quad_delta: Optional[float] = None
    quad_converged: Optional[bool] = None

class ConvergenceCheck(ReportBase):
    value: float
    refined: float
    delta: float
    order: int
    refined_order: int
    converged: bool

class OverlapFixedPoint(ReportBase):
    report_type: Literal["overlap_fixed_point"] = "overlap_fixed_point"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    q: float = Field(..., ge=0, le=1)
    residual: float
    iterations: int
    method: SolverMethod
    provenance: Provenance = Field(default_factory=Provenance)

class StateEvolutionTable(ReportBase):
    report_type: Literal["state_evolution"] = "state_evolution"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    q: float
    requested_depth: int
    K: int
    alpha: List[float]
    gamma: List[float]
    gamma2cum: List[float]
    terminated_early: bool = False
    provenance: Provenance = Field(default_factory=Provenance)

    def gamma_at(self, s: int) -> float:
        """gamma_s, zero past the recorded depth"""
        return self.gamma[s - 1] if s <= self.K else 0.0

    def gamma2_at(self, s: int) -> float:
        """Gamma_s^2 with Gamma_0^2 = 0, saturated at the last recorded value"""
        if s <= 0:
            return 0.0
        return self.gamma2cum[s - 1] if s <= self.K else self.q

    def remaining(self, s: int) -> float:
        """sqrt(q - Gamma_s^2), clamped at zero"""
        return float(np.sqrt(max(self.q - self.gamma2_at(s), 0.0)))

class ConcentrationReport(ReportBase):
    report_type: Literal["concentration"] = "concentration"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    k: int
    phi_deviation: List[float]
    overlap_deviation: List[float]
    self_overlap_deviation: float
    max_deviation: float
    provenance: Provenance = Field(default_factory=Provenance)

class DistributionReport(ReportBase):
    report_type: Literal["distribution"] = "distribution"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    empirical: Dict[str, float]
    expected: Dict[str, float]
    gaps: Dict[str, float]
    phi_zeta: List[float]
    phi_zeta_reference_variance: float
    zeta_norms: List[float]
    provenance: Provenance = Field(default_factory=Provenance)

class VarianceEstimate(ReportBase):
    report_type: Literal["variance_estimate"] = "variance_estimate"
    schema_version: str = SCHEMA_VERSION
    N: int
    samples: int
    variance: float
    reference: float
    ratio: float

class MassReport(ReportBase):
    mass: float = Field(..., ge=0, le=1)
    log_mass: float
    bound: float
    exact: bool
    stderr: Optional[float] = None
    members: Optional[int] = None

class McEstimate(ReportBase):
    """Monte Carlo mean of Z (or Z^2) expressed relative to the exact value"""
    samples: int
    log_mean_per_N: float
    mean_ratio: float
    stderr_ratio: float
    z_score: float
    gate: float
    passed: bool

class MomentReport(ReportBase):
    report_type: Literal["moments"] = "moments"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    pfree_mass: float = Field(..., ge=0, le=1)
    log_first_moment_per_N: Optional[float] = None
    predicted_first: Optional[float] = None
    finite_center: Optional[float] = None
    eps_correction: Optional[float] = None
    mass_correction: Optional[float] = None
    log_second_moment_per_N: Optional[float] = None
    predicted_second: Optional[float] = None
    mc_estimate: Optional[McEstimate] = None
    mc_second_estimate: Optional[McEstimate] = None
    provenance: Provenance = Field(default_factory=Provenance)

class ErrorBudget(ReportBase):
    eps_term: float
    concentration_term: float
    quadratic_remainder: float
    phi_zeta_term: float
    gamma_zeta_term: float
    sqrt_zeta_term: float

    @property
    def total(self) -> float:
        return (self.eps_term + self.concentration_term + self.quadratic_remainder
                + self.phi_zeta_term + self.gamma_zeta_term + self.sqrt_zeta_term)

class DecompositionReport(ReportBase):
    report_type: Literal["decomposition"] = "decomposition"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    lhs: float
    rhs: float
    residual: float
    terms: Dict[str, float]
    budget: Optional[ErrorBudget] = None
    provenance: Provenance = Field(default_factory=Provenance)

class FreeEnergySample(ReportBase):
    report_type: Literal["free_energy_sample"] = "free_energy_sample"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    N: int
    seed: Optional[int] = None
    stream: Tuple[int, ...] = ()
    f_N: float
    lower_anchor: float
    form_residual: float
    drift: float

class DisorderAverage(ReportBase):
    report_type: Literal["disorder_average"] = "disorder_average"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    N: int
    samples: int
    mean_f: float
    stderr: float
    std: float
    rs: float
    values: List[float]
    provenance: Provenance = Field(default_factory=Provenance)

class AnnealedEstimate(ReportBase):
    report_type: Literal["annealed"] = "annealed"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    N: int
    samples: int
    estimate: float
    stderr: float
    exact: float
    provenance: Provenance = Field(default_factory=Provenance)

class DrawRecord(ReportBase):
    index: int
    seed: int
    f_N: float
    rhs: float
    rhs_tight: float
    gap: float
    mean_log_cosh: float
    log_reduced_per_N: float
    pfree_mass: float
    members: int
    min_correction: float
    budget: ErrorBudget

class PipelineReport(ReportBase):
    report_type: Literal["lower_bound"] = "lower_bound"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    N: int
    K: int
    epsilon: float
    q: float
    rs: float
    median_gap: float
    median_rs_gap: float
    draws: List[DrawRecord]
    provenance: Provenance = Field(default_factory=Provenance)

class PhasePoint(ReportBase):
    h: float = Field(..., ge=0)
    beta_at: float = Field(..., ge=0)
    beta_tech: float = Field(..., ge=0)
    q_at: float
    q_tech: float

    @property
    def T_at(self) -> float:
        return 1.0 / self.beta_at if self.beta_at > 0 else float("inf")

    @property
    def T_tech(self) -> float:
        return 1.0 / self.beta_tech if self.beta_tech > 0 else float("inf")

class PhaseCurve(ReportBase):
    report_type: Literal["phase_curve"] = "phase_curve"
    schema_version: str = SCHEMA_VERSION
    tol: float
    points: List[PhasePoint]
    provenance: Provenance = Field(default_factory=Provenance)

class TapSummary(ReportBase):
    report_type: Literal["tap_run"] = "tap_run"
    schema_version: str = SCHEMA_VERSION
    params: ModelParams
    N: int
    k: int
    q: float
    orthonormality_error: float
    annihilation_error: float
    reconstruction_error: float
    concentration: ConcentrationReport
    provenance: Provenance = Field(default_factory=Provenance)

AnyReport = Union[
    OverlapFixedPoint, StateEvolutionTable, ConcentrationReport, DistributionReport,
    VarianceEstimate, MomentReport, DecompositionReport, FreeEnergySample,
    DisorderAverage, AnnealedEstimate, PipelineReport, PhaseCurve, TapSummary,
]

REPORT_TYPES = {
    model.model_fields["report_type"].default: model
    for model in AnyReport.__args__
}

def parse_report(text: str) -> ReportBase:
    """Parse any emitted JSON report back into its model"""
    kind = json.loads(text).get("report_type")
    if kind not in REPORT_TYPES:
        raise ValueError(f"Unknown report type: {kind}")
    return REPORT_TYPES[kind].model_validate_json(text)
