"""
Numerical services: quadrature, scalar theory, the TAP construction, the reduced
partition function, free-energy experiments and the phase diagram.
"""

from rslab.services.quadrature import gauss_hermite_rule, expect1, psi, check_convergence, escalate_field_rule
from rslab.services.scalar_theory import (
    solve_q,
    state_evolution,
    at_value,
    tech_value,
    rs_free_energy,
)
from rslab.services.tap_construction import (
    tap_iterate,
    verify_concentration,
    conditional_resample,
    cavity_statistics,
    save_tap_state,
    load_tap_state,
)
from rslab.services.reduced_partition import (
    p_free_measure,
    reduced_set_mass,
    conditional_first_moment,
    conditional_second_moment,
    conditional_moments,
)
from rslab.services.free_energy import (
    exact_log_partition,
    disorder_average,
    annealed_average,
    decomposition_check,
    lower_bound_pipeline,
)
from rslab.services.phase_diagram import PhaseDiagramEngine, boundary_scan, region_classify
from rslab.services.runner import LabRunner, RunResult

__all__ = [
    "gauss_hermite_rule",
    "expect1",
    "psi",
    "check_convergence",
    "escalate_field_rule",
    "solve_q",
    "state_evolution",
    "at_value",
    "tech_value",
    "rs_free_energy",
    "tap_iterate",
    "verify_concentration",
    "conditional_resample",
    "cavity_statistics",
    "save_tap_state",
    "load_tap_state",
    "p_free_measure",
    "reduced_set_mass",
    "conditional_first_moment",
    "conditional_second_moment",
    "conditional_moments",
    "exact_log_partition",
    "disorder_average",
    "annealed_average",
    "decomposition_check",
    "lower_bound_pipeline",
    "PhaseDiagramEngine",
    "boundary_scan",
    "region_classify",
    "LabRunner",
    "RunResult",
]
