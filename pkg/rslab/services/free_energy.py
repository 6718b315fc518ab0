"""Free-energy experiments: exact partition functions, disorder averages, the
re-centred Hamiltonian decomposition and the assembled lower bound."""

import logging
from typing import Dict, Iterable, Optional

import numpy as np
from joblib import Parallel, delayed

from rslab.config import settings
from rslab.models.coin_tossing import log_two_cosh
from rslab.models.disorder import Disorder
from rslab.models.tap_state import TapState
from rslab.schemas.params import ModelParams, ReducedSetSpec
from rslab.schemas.reports import (
    AnnealedEstimate,
    DecompositionReport,
    DisorderAverage,
    DrawRecord,
    ErrorBudget,
    FreeEnergySample,
    PipelineReport,
    Provenance,
)
from rslab.services.enumeration import log_partition, require_size
from rslab.services.reduced_partition import scan_state
from rslab.services.scalar_theory import rs_free_energy, solve_q
from rslab.services.tap_construction import SeedLike, disorder_for_draw, tap_iterate
from rslab.utils.rng import CONFIG_STREAM, as_seed_record, make_rng
from rslab.utils.validators import (
    IdentityViolation,
    validate_int_range,
    validate_spins,
)

logger = logging.getLogger(__name__)

ARITHMETIC_SLACK = 1e-9
FORM_CHECK_POINTS = 100

def hamiltonian_raw(d: Disorder, params: ModelParams, sigma: np.ndarray) -> np.ndarray:
    """(beta/sqrt 2) sum_ij g_ij s_i s_j + h sum_i s_i for one or many configurations"""
    sigma = np.atleast_2d(sigma)
    pair = np.einsum("bi,ij,bj->b", sigma, d.g, sigma)
    return params.beta / np.sqrt(2.0) * pair + params.h * sigma.sum(axis=1)

def hamiltonian_symmetric(d: Disorder, params: ModelParams, sigma: np.ndarray) -> np.ndarray:
    """N [(beta/2) <s, gbar s> + h <1, s>]"""
    sigma = np.atleast_2d(sigma)
    N = d.N
    pair = np.einsum("bi,ij,bj->b", sigma, d.gbar, sigma) / N
    return N * (params.beta / 2.0 * pair + params.h * sigma.sum(axis=1) / N)

def exact_log_partition(d: Disorder, params: ModelParams) -> FreeEnergySample:
    """f_N = (1/N) log sum_sigma exp H_N(sigma) by Gray-code enumeration"""
    N = d.N
    require_size(N, settings.max_enumeration_size, "enumeration")

    record = d.seed.child(CONFIG_STREAM) if d.seed else as_seed_record(0, CONFIG_STREAM)
    rng = make_rng(record)
    spins = np.where(rng.random((FORM_CHECK_POINTS, N)) < 0.5, -1.0, 1.0)
    form_residual = float(np.max(np.abs(
        hamiltonian_raw(d, params, spins) - hamiltonian_symmetric(d, params, spins)
    )) / N)
    if form_residual > 1e-10:
        raise IdentityViolation(f"Raw and symmetrized Hamiltonians disagree by {form_residual:.3e}")

    log_z, drift = log_partition(0.5 * params.beta * d.gbar, np.full(N, params.h))
    f_N = log_z / N

    ones = np.ones(N)
    lower_anchor = float(hamiltonian_symmetric(d, params, ones)[0] / N)
    if f_N < lower_anchor - ARITHMETIC_SLACK:
        raise IdentityViolation(f"f_N={f_N:.12g} below H(1)/N={lower_anchor:.12g}")

    return FreeEnergySample(
        params=params,
        N=N,
        seed=d.seed.seed if d.seed else None,
        stream=d.seed.stream if d.seed else (),
        f_N=float(f_N),
        lower_anchor=lower_anchor,
        form_residual=form_residual,
        drift=drift,
    )

def _draw_free_energy(params: ModelParams, N: int, seed: SeedLike, index: int) -> float:
    return exact_log_partition(disorder_for_draw(N, seed, index), params).f_N

def _parallel(threads: Optional[int]) -> Parallel:
    return Parallel(n_jobs=threads or settings.threads)

def disorder_average(params: ModelParams, N: int, samples: Optional[int] = None,
                     seed: SeedLike = 0, threads: Optional[int] = None) -> DisorderAverage:
    """Mean and standard error of f_N over independent disorder draws"""
    samples = samples or settings.disorder_samples
    validate_int_range(samples, 2, 10**6, "samples")
    require_size(N, settings.max_enumeration_size, "enumeration")

    values = np.array(_parallel(threads)(
        delayed(_draw_free_energy)(params, N, seed, i) for i in range(samples)
    ))
    std = float(np.std(values, ddof=1))
    q = solve_q(params).q
    record = as_seed_record(seed)
    logger.info(f"Disorder average over {samples} draws at N={N}: {values.mean():.6f}",
                extra={"N": N, "beta": params.beta, "h": params.h, "seed": record.seed})
    return DisorderAverage(
        params=params,
        N=N,
        samples=samples,
        mean_f=float(values.mean()),
        stderr=std / np.sqrt(samples),
        std=std,
        rs=rs_free_energy(params, q),
        values=[float(v) for v in values],
        provenance=Provenance(seed=record.seed, stream=record.stream, N=N,
                              quad_order=settings.quad_order),
    )

def free_energy_fluctuations(params: ModelParams, sizes: Iterable[int], samples: Optional[int] = None,
                             seed: SeedLike = 0, threads: Optional[int] = None) -> Dict[int, DisorderAverage]:
    """Disorder averages per system size; the spread of f_N shrinks with N"""
    return {
        N: disorder_average(params, N, samples, as_seed_record(seed, N), threads)
        for N in sizes
    }

def annealed_exact(params: ModelParams, N: int) -> float:
    """(1/N) log E Z_N = log(2 cosh h) + beta^2 (N - 1) / (4N)"""
    return float(log_two_cosh(params.h) + params.beta ** 2 * (N - 1) / (4.0 * N))

def annealed_average(params: ModelParams, N: int, samples: Optional[int] = None,
                     seed: SeedLike = 0, threads: Optional[int] = None) -> AnnealedEstimate:
    """Monte Carlo (1/N) log E Z_N with a delta-method standard error"""
    samples = samples or settings.disorder_samples
    validate_int_range(samples, 2, 10**6, "samples")
    exact = annealed_exact(params, N)

    f_values = np.array(_parallel(threads)(
        delayed(_draw_free_energy)(params, N, seed, i) for i in range(samples)
    ))
    ratios = np.exp(N * (f_values - exact))
    mean = float(ratios.mean())
    stderr = float(np.std(ratios, ddof=1) / np.sqrt(samples))
    record = as_seed_record(seed)
    return AnnealedEstimate(
        params=params,
        N=N,
        samples=samples,
        estimate=exact + np.log(mean) / N,
        stderr=stderr / mean / N,
        exact=exact,
        provenance=Provenance(seed=record.seed, stream=record.stream, N=N),
    )

def error_budget(state: TapState, epsilon: float) -> ErrorBudget:
    """Deterministic bounds on the restricted-set corrections, with C = 2"""
    beta, k, ip = state.params.beta, state.k, state.ip
    radius = epsilon / k
    norms = np.array([ip.norm(z) for z in state.zeta])
    phi_zeta = np.array([ip.inner(p, z) for p, z in zip(state.phi, state.zeta)])
    gamma = state.gamma
    deviation = np.abs(state.centers() - gamma)

    return ErrorBudget(
        eps_term=float(2.0 * beta * radius * norms.sum()),
        concentration_term=float(2.0 * beta * np.sum(norms * deviation)),
        quadratic_remainder=float(beta / 2.0 * np.sum(np.abs(phi_zeta) * (radius + deviation) ** 2)),
        phi_zeta_term=float(beta / 2.0 * np.sum(gamma ** 2 * phi_zeta)),
        gamma_zeta_term=float(beta * gamma[-1] * norms[-1]),
        sqrt_zeta_term=float(beta * state.se.remaining(k - 1) * norms[-1]),
    )

def decomposition_check(state: TapState, sigma: np.ndarray,
                        epsilon: Optional[float] = None) -> DecompositionReport:
    """Evaluate both sides of the re-centred decomposition of H_N(sigma)/N"""
    N, k, beta, ip = state.N, state.k, state.params.beta, state.ip
    sigma = validate_spins(sigma, N)
    gamma = state.gamma

    lhs = float(hamiltonian_raw(state.disorder, state.params, sigma)[0] / N)

    reduced = beta / 2.0 * ip.form(sigma, state.gmod_bar, sigma)
    cavity = float(ip.inner(state.hfield, sigma))
    centered = 0.0
    for s in range(k):
        shifted = sigma - gamma[s] * state.phi[s]
        along = ip.inner(state.phi[s], shifted)
        centered += (2.0 * ip.inner(shifted, state.zeta[s]) * along
                     - ip.inner(state.zeta[s], state.phi[s]) * along ** 2)
    centered *= beta / 2.0
    phi_zeta = ip.inner(state.phi, state.zeta)
    shift = -beta / 2.0 * float(np.sum(gamma ** 2 * np.diagonal(phi_zeta)))
    last = beta * (gamma[-1] - state.se.remaining(k - 1)) * float(ip.inner(sigma, state.zeta[-1]))

    rhs = reduced + cavity + centered + shift + last
    return DecompositionReport(
        params=state.params,
        lhs=lhs,
        rhs=float(rhs),
        residual=float(abs(lhs - rhs)),
        terms={
            "reduced_energy": float(reduced),
            "cavity_energy": cavity,
            "centered_quadratic": float(centered),
            "phi_zeta_shift": shift,
            "zeta_k_correction": last,
        },
        budget=error_budget(state, epsilon) if epsilon is not None else None,
        provenance=Provenance(N=N, k=k, epsilon=epsilon),
    )

def _pipeline_draw(params: ModelParams, N: int, K: int, epsilon: float, q: float,
                   seed: SeedLike, index: int) -> DrawRecord:
    disorder = disorder_for_draw(N, seed, index)
    state = tap_iterate(disorder, params, q, K)
    scan = scan_state(state, ReducedSetSpec(epsilon=epsilon, k=K))
    budget = error_budget(state, epsilon)

    f_N = scan.log_z / N
    mean_log_cosh = float(np.mean(log_two_cosh(state.hfield)) - np.log(2.0))
    log_reduced = scan.log_reduced / N
    base = np.log(2.0) + mean_log_cosh + log_reduced
    rhs = base - budget.total
    rhs_tight = base + scan.min_correction if scan.members else -np.inf

    if rhs > rhs_tight + ARITHMETIC_SLACK:
        raise IdentityViolation(f"Draw {index}: error budget {budget.total:.6g} below the exact correction")
    if f_N < rhs_tight - ARITHMETIC_SLACK:
        raise IdentityViolation(f"Draw {index}: f_N={f_N:.12g} below restricted bound {rhs_tight:.12g}")

    return DrawRecord(
        index=index,
        seed=as_seed_record(seed).seed,
        f_N=float(f_N),
        rhs=float(rhs),
        rhs_tight=float(rhs_tight),
        gap=float(f_N - rhs),
        mean_log_cosh=mean_log_cosh,
        log_reduced_per_N=float(log_reduced),
        pfree_mass=float(min(np.exp(scan.log_mass), 1.0)),
        members=scan.members,
        min_correction=float(scan.min_correction),
        budget=budget,
    )

def lower_bound_pipeline(params: ModelParams, N: int, K: int, epsilon: float, seed: SeedLike = 0,
                         samples: Optional[int] = None, threads: Optional[int] = None) -> PipelineReport:
    """Per-draw exact f_N against the restricted lower bound"""
    require_size(N, settings.max_pipeline_size, "pipeline")
    samples = samples or settings.disorder_samples
    validate_int_range(samples, 1, 10**6, "samples")
    ReducedSetSpec(epsilon=epsilon, k=K)

    q = solve_q(params).q
    rs = rs_free_energy(params, q)
    draws = _parallel(threads)(
        delayed(_pipeline_draw)(params, N, K, epsilon, q, seed, i) for i in range(samples)
    )
    gaps = np.array([draw.gap for draw in draws])
    rs_gaps = np.array([abs(draw.f_N - rs) for draw in draws])
    record = as_seed_record(seed)
    logger.info(f"Lower-bound pipeline: {samples} draws at N={N}, median gap {np.median(gaps):.4f}",
                extra={"N": N, "k": K, "epsilon": epsilon, "seed": record.seed})

    return PipelineReport(
        params=params,
        N=N,
        K=K,
        epsilon=epsilon,
        q=q,
        rs=rs,
        median_gap=float(np.median(gaps)),
        median_rs_gap=float(np.median(rs_gaps)),
        draws=list(draws),
        provenance=Provenance(seed=record.seed, stream=record.stream, N=N, k=K,
                              epsilon=epsilon, quad_order=settings.quad_order),
    )
