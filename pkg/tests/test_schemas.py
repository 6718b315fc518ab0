import numpy as np
import pytest
from pydantic import ValidationError

from rslab.schemas.params import ModelParams, ReducedSetSpec
from rslab.schemas.reports import (
    SCHEMA_VERSION,
    MassReport,
    OverlapFixedPoint,
    parse_report,
)
from rslab.schemas.run_config import Command, OutputFormat, RunConfig
from rslab.services.scalar_theory import solve_q, state_evolution

@pytest.mark.parametrize("beta, h", [(-0.1, 0.2), (0.5, -1.0), (float("inf"), 0.1), (0.5, float("nan"))])
def test_model_params_reject(beta, h):
    with pytest.raises(ValidationError):
        ModelParams(beta=beta, h=h)

def test_model_params_frozen(params):
    with pytest.raises(ValidationError):
        params.beta = 1.0

def test_reduced_set_radius():
    assert ReducedSetSpec(epsilon=0.6, k=3).radius == pytest.approx(0.2)
    with pytest.raises(ValidationError):
        ReducedSetSpec(epsilon=0.0, k=2)

def test_reports_round_trip(params, rule):
    report = solve_q(params, rule=rule)
    text = report.model_dump_json(indent=2)
    parsed = parse_report(text)
    assert isinstance(parsed, OverlapFixedPoint)
    assert parsed == report
    assert parsed.schema_version == SCHEMA_VERSION
    assert parsed.provenance.quad_order == rule.order

    table = state_evolution(params, report.q, 4, rule)
    assert parse_report(table.model_dump_json()) == table

def test_unknown_report_type():
    with pytest.raises(ValueError):
        parse_report('{"report_type": "nothing"}')

def test_infinite_log_mass_serializes():
    report = MassReport(mass=0.0, log_mass=-np.inf, bound=-1.0, exact=False, stderr=0.0)
    text = report.model_dump_json()
    assert "-Infinity" in text
    assert MassReport.model_validate_json(text).log_mass == -np.inf

def test_run_config_requires_command_fields():
    with pytest.raises(ValidationError, match="requires: N, k"):
        RunConfig(command=Command.TAP_RUN, beta=0.5, h=0.4)
    config = RunConfig(command="solve-q", beta=0.0, h=0.7)
    assert config.command is Command.SOLVE_Q
    assert config.format is OutputFormat.JSON

def test_run_config_rejects_unknown_fields():
    with pytest.raises(ValidationError):
        RunConfig(command=Command.SOLVE_Q, beta=0.0, h=0.7, temperature=2.0)

@pytest.mark.parametrize("field, value", [("seed", -1), ("seed", 2 ** 64), ("quad_order", 600), ("N", 0)])
def test_run_config_ranges(field, value):
    fields = dict(command=Command.FREE_ENERGY, beta=0.5, h=0.1, N=8)
    fields[field] = value
    with pytest.raises(ValidationError):
        RunConfig(**fields)
