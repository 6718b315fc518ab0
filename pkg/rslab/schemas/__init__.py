"""
Pydantic schemas for parameters and emitted reports.
"""

from rslab.schemas.params import ModelParams, ReducedSetSpec
from rslab.schemas.run_config import Command, OutputFormat, RunConfig
from rslab.schemas.reports import (
    SCHEMA_VERSION,
    SolverMethod,
    RegionKind,
    Provenance,
    ConvergenceCheck,
    OverlapFixedPoint,
    StateEvolutionTable,
    ConcentrationReport,
    DistributionReport,
    VarianceEstimate,
    MassReport,
    McEstimate,
    MomentReport,
    ErrorBudget,
    DecompositionReport,
    FreeEnergySample,
    DisorderAverage,
    AnnealedEstimate,
    DrawRecord,
    PipelineReport,
    PhasePoint,
    PhaseCurve,
    TapSummary,
    parse_report,
)

__all__ = [
    # Parameters
    "ModelParams",
    "ReducedSetSpec",

    # Run configuration
    "Command",
    "OutputFormat",
    "RunConfig",

    # Reports
    "SCHEMA_VERSION",
    "SolverMethod",
    "RegionKind",
    "Provenance",
    "ConvergenceCheck",
    "OverlapFixedPoint",
    "StateEvolutionTable",
    "ConcentrationReport",
    "DistributionReport",
    "VarianceEstimate",
    "MassReport",
    "McEstimate",
    "MomentReport",
    "ErrorBudget",
    "DecompositionReport",
    "FreeEnergySample",
    "DisorderAverage",
    "AnnealedEstimate",
    "DrawRecord",
    "PipelineReport",
    "PhasePoint",
    "PhaseCurve",
    "TapSummary",
    "parse_report",
]
