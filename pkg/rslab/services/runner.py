"""Dispatch of reproducible command runs to the lab services."""

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np
import pandas as pd

from rslab.models.quadrature import QuadratureRule
from rslab.schemas.params import ModelParams, ReducedSetSpec
from rslab.schemas.reports import ReportBase, TapSummary
from rslab.schemas.run_config import Command, OutputFormat, RunConfig
from rslab.services.free_energy import decomposition_check, disorder_average, lower_bound_pipeline
from rslab.services.phase_diagram import boundary_scan, parse_grid
from rslab.services.quadrature import gauss_hermite_rule
from rslab.services.reduced_partition import conditional_moments
from rslab.services.scalar_theory import solve_q, state_evolution
from rslab.services.tables import disorder_frame, phase_frame, pipeline_frame, write_table
from rslab.services.tap_construction import (
    disorder_for_draw,
    save_tap_state,
    structure_errors,
    tap_iterate,
    verify_concentration,
)
from rslab.utils.logger import LoggerMixin
from rslab.utils.validators import InvalidArgumentError

@dataclass(frozen=True)
class RunResult:
    report: ReportBase
    summary: str
    frame: Optional[pd.DataFrame] = None

    def render(self, fmt: OutputFormat) -> str:
        if fmt is OutputFormat.CSV:
            if self.frame is None:
                raise InvalidArgumentError(f"CSV output is not available for {self.report.report_type}")
            return write_table(self.frame)
        return self.report.model_dump_json(indent=2) + "\n"

class LabRunner(LoggerMixin):
    """Runs one configured command and renders its artifact"""

    def __init__(self):
        self.commands: Dict[Command, Callable[[RunConfig], RunResult]] = {
            Command.SOLVE_Q: self._solve_q,
            Command.SE_TABLE: self._se_table,
            Command.PHASE_SCAN: self._phase_scan,
            Command.TAP_RUN: self._tap_run,
            Command.MOMENTS: self._moments,
            Command.FREE_ENERGY: self._free_energy,
            Command.LOWER_BOUND: self._lower_bound,
            Command.DECOMP_CHECK: self._decomp_check,
        }

    def run(self, config: RunConfig) -> RunResult:
        self.logger.info(f"Running {config.command.value}", extra={"command": config.command.value,
                                                                     "seed": config.seed})
        result = self.commands[config.command](config)
        self.logger.info(f"Finished {config.command.value}: {result.summary}",
                         extra={"command": config.command.value})
        return result

    def emit(self, config: RunConfig, result: RunResult) -> str:
        """Render the artifact and write it to the configured path"""
        text = result.render(config.format)
        if config.out_path:
            path = Path(config.out_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        return text

    @staticmethod
    def _params(config: RunConfig) -> ModelParams:
        return ModelParams(beta=config.beta, h=config.h)

    @staticmethod
    def _rule(config: RunConfig) -> Optional[QuadratureRule]:
        """Explicit rule when an order is requested; otherwise the services escalate on their own"""
        return gauss_hermite_rule(config.quad_order) if config.quad_order else None

    def _state(self, config: RunConfig):
        params = self._params(config)
        rule = self._rule(config)
        q = solve_q(params, rule=rule).q
        disorder = disorder_for_draw(config.N, config.seed, 0)
        return tap_iterate(disorder, params, q, config.k, rule)

    def _solve_q(self, config: RunConfig) -> RunResult:
        report = solve_q(self._params(config), config.tol, self._rule(config))
        accuracy = report.provenance
        return RunResult(report, f"q={report.q:.12g} residual={report.residual:.3e} "
                                 f"method={report.method.value} order={accuracy.quad_order} "
                                 f"quad_converged={accuracy.quad_converged}")

    def _se_table(self, config: RunConfig) -> RunResult:
        params, rule = self._params(config), self._rule(config)
        q = solve_q(params, config.tol, rule).q
        table = state_evolution(params, q, config.k, rule)
        frame = pd.DataFrame({
            "k": np.arange(1, table.K + 1),
            "alpha": table.alpha,
            "gamma": table.gamma,
            "gamma2cum": table.gamma2cum,
        })
        return RunResult(table, f"depth={table.K} q={q:.12g} "
                                f"q-Gamma^2={q - table.gamma2cum[-1]:.3e}", frame)

    def _phase_scan(self, config: RunConfig) -> RunResult:
        curve = boundary_scan(parse_grid(config.h_grid), config.tol, config.threads, config.quad_order)
        worst = max(p.beta_tech - p.beta_at for p in curve.points)
        return RunResult(curve, f"points={len(curve.points)} max(beta_tech-beta_at)={worst:.3e}",
                         phase_frame(curve))

    def _tap_run(self, config: RunConfig) -> RunResult:
        state = self._state(config)
        errors = structure_errors(state)
        concentration = verify_concentration(state)
        if config.dump_path:
            save_tap_state(state, config.dump_path)
        report = TapSummary(
            params=state.params,
            N=state.N,
            k=state.k,
            q=state.q,
            orthonormality_error=errors["orthonormality"],
            annihilation_error=errors["annihilation"],
            reconstruction_error=errors["reconstruction"],
            concentration=concentration,
            provenance=concentration.provenance,
        )
        return RunResult(report, f"N={state.N} k={state.k} "
                                 f"max_deviation={concentration.max_deviation:.3e}")

    def _moments(self, config: RunConfig) -> RunResult:
        state = self._state(config)
        spec = ReducedSetSpec(epsilon=config.epsilon, k=config.k)
        report = conditional_moments(state, spec, config.mc_samples, config.seed)
        return RunResult(report, f"first={report.log_first_moment_per_N:.6g} "
                                 f"second={report.log_second_moment_per_N:.6g} "
                                 f"mass={report.pfree_mass:.6g}")

    def _free_energy(self, config: RunConfig) -> RunResult:
        average = disorder_average(self._params(config), config.N, config.samples,
                                   config.seed, config.threads)
        return RunResult(average, f"mean_f={average.mean_f:.6f} stderr={average.stderr:.2e} "
                                  f"rs={average.rs:.6f}", disorder_frame(average))

    def _lower_bound(self, config: RunConfig) -> RunResult:
        report = lower_bound_pipeline(self._params(config), config.N, config.k, config.epsilon,
                                      config.seed, config.samples, config.threads)
        return RunResult(report, f"draws={len(report.draws)} median_gap={report.median_gap:.6f} "
                                 f"rs={report.rs:.6f}", pipeline_frame(report))

    def _decomp_check(self, config: RunConfig) -> RunResult:
        state = self._state(config)
        sigma = np.where(state.magnetization >= 0.0, 1.0, -1.0)
        report = decomposition_check(state, sigma, config.epsilon)
        return RunResult(report, f"residual={report.residual:.3e}")
