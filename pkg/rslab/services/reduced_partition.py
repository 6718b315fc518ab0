"""Coin-tossing measure, restricted set, and conditional moments of the reduced partition function."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from rslab.config import settings
from rslab.models.coin_tossing import PFreeMeasure
from rslab.models.tap_state import TapState
from rslab.schemas.params import ReducedSetSpec
from rslab.schemas.reports import MassReport, McEstimate, MomentReport, Provenance
from rslab.services.enumeration import (
    RestrictedScan,
    all_configurations,
    require_size,
    restricted_scan,
)
from rslab.services.tap_construction import SeedLike, conditional_resample_batch, resample_seed
from rslab.utils.rng import PFREE_STREAM, as_seed_record, make_rng
from rslab.utils.validators import (
    CapabilityError,
    IdentityViolation,
    InvalidArgumentError,
)

logger = logging.getLogger(__name__)

# Row block for the pair sum; bounds the dense overlap block to block x |S|
PAIR_BLOCK = 512
# Relative slack for exact identities evaluated along different summation paths
IDENTITY_SLACK = 1e-9

def p_free_measure(state: TapState) -> PFreeMeasure:
    """Product measure tilted by the cavity field h^(k+1)"""
    return PFreeMeasure(state.hfield)

def concentration_bound(N: int, spec: ReducedSetSpec) -> float:
    """1 - 2k exp(-N eps^2 / (2k^2))"""
    return 1.0 - 2.0 * spec.k * np.exp(-N * spec.epsilon ** 2 / (2.0 * spec.k ** 2))

def _check_spec(state: TapState, spec: ReducedSetSpec) -> None:
    if spec.k != state.k:
        raise InvalidArgumentError(f"Restricted-set depth {spec.k} differs from state depth {state.k}")

def scan_state(state: TapState, spec: ReducedSetSpec) -> RestrictedScan:
    """Gray-code pass over the state's configurations"""
    _check_spec(state, spec)
    beta, N = state.params.beta, state.N
    return restricted_scan(
        A_full=0.5 * beta * state.disorder.gbar,
        b_full=np.full(N, state.params.h),
        A_red=0.5 * beta * state.gmod_bar,
        field=state.hfield,
        phi=state.phi,
        center=state.centers(),
        radius=spec.radius,
        coef=beta ** 2 * N / 4.0,
        log_norm=p_free_measure(state).log_normalizer,
    )

@dataclass(frozen=True)
class Members:
    """Configurations of S with their log-probabilities and phi-projections"""
    sigma: np.ndarray
    log_p: np.ndarray
    proj: np.ndarray

    @property
    def size(self) -> int:
        return int(self.sigma.shape[0])

def restricted_members(state: TapState, spec: ReducedSetSpec) -> Members:
    """Dense list of S; limited to the pair-enumeration size"""
    _check_spec(state, spec)
    configs = all_configurations(state.N)
    proj = state.ip.inner(configs, state.phi)
    inside = np.all(np.abs(proj - state.centers()) <= spec.radius, axis=1)
    sigma = configs[inside]
    return Members(sigma=sigma, log_p=p_free_measure(state).log_prob(sigma), proj=proj[inside])

def _first_exponent(state: TapState, members: Members) -> np.ndarray:
    complement = 1.0 - np.sum(members.proj ** 2, axis=1)
    return state.params.beta ** 2 * state.N / 4.0 * complement ** 2

def _membership(state: TapState, spec: ReducedSetSpec, sigma: np.ndarray) -> np.ndarray:
    proj = state.ip.inner(sigma, state.phi)
    return np.all(np.abs(proj - state.centers()) <= spec.radius, axis=1)

def reduced_set_mass(state: TapState, spec: ReducedSetSpec, mc: bool = True,
                     samples: Optional[int] = None, seed: SeedLike = 0) -> MassReport:
    """p_free(S) exactly by enumeration, or by sampling above the enumeration cap"""
    _check_spec(state, spec)
    N = state.N
    bound = concentration_bound(N, spec)

    if N <= settings.max_enumeration_size:
        scan = scan_state(state, spec)
        mass = float(min(np.exp(scan.log_mass), 1.0))
        if bound > 0.0 and mass < bound - IDENTITY_SLACK:
            raise IdentityViolation(f"p_free(S)={mass:.6g} is below the concentration bound {bound:.6g}")
        return MassReport(mass=mass, log_mass=scan.log_mass, bound=float(bound),
                          exact=True, members=scan.members)

    if not mc:
        raise CapabilityError(
            f"N={N} exceeds the enumeration limit and sampling is disabled",
            size=N, limit=settings.max_enumeration_size,
        )

    samples = samples or settings.mc_samples
    measure = p_free_measure(state)
    hits = 0
    for batch, start in enumerate(range(0, samples, settings.mc_batch_size)):
        count = min(settings.mc_batch_size, samples - start)
        rng = make_rng(as_seed_record(seed, PFREE_STREAM, batch))
        hits += int(np.count_nonzero(_membership(state, spec, measure.sample(rng, count))))
    mass = hits / samples
    stderr = float(np.sqrt(max(mass * (1.0 - mass), 0.0) / samples))
    logger.info(f"Sampled p_free(S)={mass:.4f} +/- {stderr:.4f} from {samples} draws")
    return MassReport(mass=mass, log_mass=float(np.log(mass)) if mass > 0 else -np.inf,
                      bound=float(bound), exact=False, stderr=stderr)

def _mc_ratios(state: TapState, members: Members, samples: int, seed: SeedLike,
               power: int, log_exact: float) -> np.ndarray:
    """Z^power / exact over conditional resamples, with Z the reduced partition function"""
    N = state.N
    outer = np.einsum("si,sj->sij", members.sigma, members.sigma).reshape(members.size, N * N)
    scale = state.params.beta / np.sqrt(2.0)
    ratios = []
    for batch, start in enumerate(range(0, samples, settings.mc_batch_size)):
        count = min(settings.mc_batch_size, samples - start)
        draws = conditional_resample_batch(state, resample_seed(seed, batch), count)
        forms = outer @ draws.reshape(count, N * N).T
        log_z = logsumexp(members.log_p[:, None] + scale * forms, axis=0)
        ratios.append(np.exp(power * log_z - log_exact))
    return np.concatenate(ratios)

def _mc_estimate(ratios: np.ndarray, log_exact: float, N: int) -> McEstimate:
    mean = float(np.mean(ratios))
    stderr = float(np.std(ratios, ddof=1) / np.sqrt(ratios.size))
    finite = bool(np.isfinite(mean) and np.isfinite(stderr))
    if not finite:
        z = float("nan")
    elif stderr > 0:
        z = (mean - 1.0) / stderr
    else:
        # Degenerate draws: every ratio equal
        z = 0.0 if abs(mean - 1.0) <= 1e-12 else float("inf")
    gate = settings.mc_sigma_gate
    return McEstimate(
        samples=int(ratios.size),
        log_mean_per_N=float((np.log(mean) + log_exact) / N) if mean > 0 else -np.inf,
        mean_ratio=mean,
        stderr_ratio=stderr,
        z_score=float(z),
        gate=gate,
        passed=bool(finite and abs(z) <= gate),
    )

def _provenance(state: TapState, spec: ReducedSetSpec) -> Provenance:
    record = state.disorder.seed
    return Provenance(
        seed=record.seed if record else None,
        stream=record.stream if record else (),
        N=state.N,
        k=state.k,
        epsilon=spec.epsilon,
        quad_order=state.se.provenance.quad_order,
    )

def conditional_first_moment(state: TapState, spec: ReducedSetSpec, mc_samples: int = 0,
                             seed: SeedLike = 0) -> MomentReport:
    """E_k Z(S) = sum_S p_free(sigma) exp[(beta^2 N / 4)(1 - sum <sigma, phi>^2)^2]"""
    scan = scan_state(state, spec)
    N, k, beta = state.N, state.k, state.params.beta

    log_first = scan.log_first_moment / N
    centers = state.centers()
    finite_center = beta ** 2 / 4.0 * (1.0 - float(np.sum(centers ** 2))) ** 2
    eps_correction = beta ** 2 / 2.0 * (2.0 * spec.epsilon + spec.epsilon ** 2 / k)
    mass_correction = -scan.log_mass / N

    if scan.members > 0:
        slack = IDENTITY_SLACK * max(1.0, abs(log_first))
        if abs(log_first - finite_center) > eps_correction + mass_correction + slack:
            raise IdentityViolation(
                f"First moment {log_first:.6g} outside bracket around {finite_center:.6g}"
            )

    mc_estimate = None
    if mc_samples and scan.members > 0:
        require_size(N, settings.max_pair_enumeration_size, "conditional Monte Carlo")
        members = restricted_members(state, spec)
        ratios = _mc_ratios(state, members, mc_samples, seed, 1, scan.log_first_moment)
        mc_estimate = _mc_estimate(ratios, scan.log_first_moment, N)
        logger.info(f"First-moment MC z-score {mc_estimate.z_score:.2f} over {mc_samples} draws")

    return MomentReport(
        params=state.params,
        pfree_mass=float(min(np.exp(scan.log_mass), 1.0)),
        log_first_moment_per_N=float(log_first),
        predicted_first=beta ** 2 / 4.0 * (1.0 - state.se.gamma2_at(k)) ** 2,
        finite_center=finite_center,
        eps_correction=eps_correction,
        mass_correction=float(mass_correction),
        mc_estimate=mc_estimate,
        provenance=_provenance(state, spec),
    )

def log_pair_sum(state: TapState, members: Members) -> float:
    """log sum_{sigma,tau in S} p p exp(a_sigma + a_tau + (beta^2 N / 2) <sigma, Q tau>^2)"""
    if members.size == 0:
        return -np.inf
    N = state.N
    weight = members.log_p + _first_exponent(state, members)
    cross = state.params.beta ** 2 * N / 2.0
    blocks = []
    for start in range(0, members.size, PAIR_BLOCK):
        rows = slice(start, start + PAIR_BLOCK)
        overlap = members.sigma[rows] @ members.sigma.T / N - members.proj[rows] @ members.proj.T
        blocks.append(logsumexp(weight[rows, None] + weight[None, :] + cross * overlap ** 2))
    return float(logsumexp(blocks))

def conditional_second_moment(state: TapState, spec: ReducedSetSpec, mc_samples: int = 0,
                              seed: SeedLike = 0) -> MomentReport:
    """E_k Z(S)^2 by the exact double sum over S x S"""
    N, beta = state.N, state.params.beta
    require_size(N, settings.max_pair_enumeration_size, "pair enumeration")
    members = restricted_members(state, spec)

    log_second = log_pair_sum(state, members)
    log_first = (float(logsumexp(members.log_p + _first_exponent(state, members)))
                 if members.size else -np.inf)
    if members.size and log_second < 2.0 * log_first - IDENTITY_SLACK * max(1.0, abs(log_first)):
        raise IdentityViolation(f"Second moment below squared first moment: {log_second} < {2 * log_first}")

    mc_estimate = None
    if mc_samples and members.size:
        ratios = _mc_ratios(state, members, mc_samples, seed, 2, log_second)
        mc_estimate = _mc_estimate(ratios, log_second, N)
        logger.info(f"Second-moment MC z-score {mc_estimate.z_score:.2f} over {mc_samples} draws")

    mass = float(np.exp(logsumexp(members.log_p))) if members.size else 0.0
    return MomentReport(
        params=state.params,
        pfree_mass=min(mass, 1.0),
        log_first_moment_per_N=log_first / N,
        log_second_moment_per_N=log_second / N,
        predicted_second=beta ** 2 / 2.0 * (1.0 - state.q) ** 2,
        mc_second_estimate=mc_estimate,
        provenance=_provenance(state, spec),
    )

def conditional_moments(state: TapState, spec: ReducedSetSpec, mc_samples: int = 0,
                        seed: SeedLike = 0) -> MomentReport:
    """First and second conditional moments in one report"""
    first = conditional_first_moment(state, spec, mc_samples, seed)
    second = conditional_second_moment(state, spec, mc_samples, seed)
    return first.model_copy(update={
        "log_second_moment_per_N": second.log_second_moment_per_N,
        "predicted_second": second.predicted_second,
        "mc_second_estimate": second.mc_second_estimate,
    })
