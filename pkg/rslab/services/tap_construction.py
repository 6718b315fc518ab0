"""Iterative TAP construction on sampled disorder and the conditional-Gaussian resampler."""

import logging
from pathlib import Path
from typing import Iterable, List, Optional, Union

import numpy as np

from rslab.config import settings
from rslab.models.coin_tossing import log_two_cosh
from rslab.models.disorder import Disorder
from rslab.models.inner_product import NormalizedInnerProduct
from rslab.models.quadrature import QuadratureRule
from rslab.models.tap_state import RankOneFactors, TapState
from rslab.schemas.params import ModelParams
from rslab.schemas.reports import (
    ConcentrationReport,
    DistributionReport,
    Provenance,
    VarianceEstimate,
)
from rslab.services.quadrature import default_rule, expect_field, gauss_hermite_rule
from rslab.services.scalar_theory import state_evolution
from rslab.utils.rng import (
    DISORDER_STREAM,
    RESAMPLE_STREAM,
    SeedRecord,
    as_seed_record,
    make_rng,
)
from rslab.utils.validators import (
    DegeneracyError,
    InvalidArgumentError,
    validate_int_range,
)

logger = logging.getLogger(__name__)

SeedLike = Union[int, SeedRecord]

# Test functions for the empirical cavity-field averages
TEST_FUNCTIONS = {
    "tanh": np.tanh,
    "tanh2": lambda x: np.tanh(x) ** 2,
    "log_cosh": lambda x: log_two_cosh(x) - np.log(2.0),
    "sech2": lambda x: np.cosh(x) ** -2.0,
}

def sample_disorder(N: int, seed: SeedLike) -> Disorder:
    """i.i.d. N(0, 1/N) couplings off the diagonal, zero diagonal"""
    validate_int_range(N, 2, settings.max_disorder_size, "N")
    record = as_seed_record(seed)
    rng = make_rng(record)
    g = rng.standard_normal((N, N)) / np.sqrt(N)
    np.fill_diagonal(g, 0.0)
    return Disorder(g=g, seed=record)

def disorder_for_draw(N: int, seed: SeedLike, index: int) -> Disorder:
    """Disorder for draw ``index`` of an experiment seeded by ``seed``"""
    return sample_disorder(N, as_seed_record(seed, DISORDER_STREAM, index))

def _orthogonalize(vector: np.ndarray, basis: np.ndarray, ip: NormalizedInnerProduct) -> np.ndarray:
    # Classical Gram-Schmidt followed by one refinement pass
    residual = vector - ip.inner(basis, vector) @ basis
    return residual - ip.inner(basis, residual) @ basis

def tap_iterate(d: Disorder, params: ModelParams, q: float, K: int,
                rule: Optional[QuadratureRule] = None) -> TapState:
    """Run the construction to depth K and return the immutable state"""
    N = d.N
    if not (1 <= K < N):
        raise InvalidArgumentError(f"Depth K must satisfy 1 <= K < N={N}: {K}")
    rule = rule or default_rule()
    se = state_evolution(params, q, K, rule)
    ip = NormalizedInnerProduct(N)
    beta, tolerance = params.beta, settings.gram_schmidt_tolerance

    g_current = np.array(d.g, dtype=np.float64)
    phi = [ip.ones()]
    m = [np.sqrt(q) * ip.ones()]
    zeta: List[np.ndarray] = []
    a_rows, b_rows, c_vals = [], [], []
    hfield = None

    for k in range(1, K + 1):
        phi_k = phi[k - 1]
        a = g_current @ phi_k
        b = g_current.T @ phi_k
        c = ip.inner(a, phi_k)
        zeta.append((a + b) / np.sqrt(2.0))

        # g^(k+1) = g^(k) - rho^(k), applied as outer-product subtractions
        g_current -= (np.outer(a, phi_k) + np.outer(phi_k, b) - c * np.outer(phi_k, phi_k)) / N
        a_rows.append(a)
        b_rows.append(b)
        c_vals.append(c)

        hfield = params.h * ip.ones()
        for s in range(1, k):
            hfield = hfield + beta * se.gamma_at(s) * zeta[s - 1]
        hfield = hfield + beta * se.remaining(k - 1) * zeta[k - 1]
        m.append(np.tanh(hfield))

        if k < K:
            basis = np.array(phi)
            residual = _orthogonalize(m[k], basis, ip)
            norm = ip.norm(residual)
            if norm < tolerance:
                raise DegeneracyError(
                    f"Gram-Schmidt residual {norm:.3e} below tolerance at step {k + 1}",
                    step=k + 1, norm=norm,
                )
            phi.append(residual / norm)

    logger.debug(f"TAP construction finished at depth {K} for N={N}")
    return TapState(
        params=params,
        q=q,
        disorder=d,
        phi=np.array(phi),
        m=np.array(m),
        zeta=np.array(zeta),
        hfield=hfield,
        gmod=g_current,
        factors=RankOneFactors(a=np.array(a_rows), b=np.array(b_rows), c=np.array(c_vals)),
        se=se,
    )

def structure_errors(state: TapState) -> dict:
    """Maximum violations of the structural identities of a state"""
    ip, k = state.ip, state.k
    gram = ip.inner(state.phi, state.phi)
    orthonormality = float(np.max(np.abs(gram - np.eye(k))))

    left = state.gmod @ state.phi.T
    right = state.gmod.T @ state.phi.T
    annihilation = float(max(np.max(np.abs(left)), np.max(np.abs(right))))

    rebuilt = state.gmod + sum(state.rho(s) for s in range(1, k + 1))
    reconstruction = float(np.max(np.abs(rebuilt - state.disorder.g)))

    zeta_error = 0.0
    for s in range(1, k + 1):
        g_s = state.modified_matrix(s)
        recomputed = (g_s + g_s.T) @ state.phi[s - 1] / np.sqrt(2.0)
        zeta_error = max(zeta_error, float(np.max(np.abs(recomputed - state.zeta[s - 1]))))

    return {
        "orthonormality": orthonormality,
        "annihilation": annihilation,
        "reconstruction": reconstruction,
        "zeta": zeta_error,
    }

def verify_concentration(state: TapState) -> ConcentrationReport:
    """Deviations of the overlaps of m^(k+1) from their state-evolution values"""
    ip, k, se = state.ip, state.k, state.se
    top = state.magnetization
    phi_dev = [abs(ip.inner(top, state.phi[s - 1]) - se.gamma_at(s)) for s in range(1, k + 1)]
    alpha = [se.alpha[s - 1] if s <= se.K else state.q for s in range(1, k + 1)]
    overlap_dev = [abs(ip.inner(top, state.m[s - 1]) - alpha[s - 1]) for s in range(1, k + 1)]
    self_dev = abs(ip.inner(top, top) - state.q)

    return ConcentrationReport(
        params=state.params,
        k=k,
        phi_deviation=[float(x) for x in phi_dev],
        overlap_deviation=[float(x) for x in overlap_dev],
        self_overlap_deviation=float(self_dev),
        max_deviation=float(max(phi_dev + overlap_dev + [self_dev])),
        provenance=_provenance(state),
    )

def _provenance(state: TapState) -> Provenance:
    seed = state.disorder.seed
    return Provenance(
        seed=seed.seed if seed else None,
        stream=seed.stream if seed else (),
        N=state.N,
        k=state.k,
        quad_order=state.se.provenance.quad_order,
    )

def _complement_apply(matrix: np.ndarray, basis: np.ndarray, N: int) -> np.ndarray:
    """Q M Q with Q = 1 - sum phi (x) phi; ``matrix`` may carry leading batch axes"""
    if basis.shape[0] == 0:
        return matrix
    left = matrix - basis.T @ (basis @ matrix) / N
    return left - (left @ basis.T) @ basis / N

def conditional_resample(state: TapState, seed: SeedLike, depth: Optional[int] = None) -> np.ndarray:
    """Q G Q with G an i.i.d. N(0, 1/N) matrix (diagonal included)

    ``depth`` selects how many phi-vectors are conditioned on; 0 gives G itself.
    """
    depth = state.k if depth is None else validate_int_range(depth, 0, state.k, "depth")
    rng = make_rng(as_seed_record(seed))
    N = state.N
    G = rng.standard_normal((N, N)) / np.sqrt(N)
    return _complement_apply(G, state.phi[:depth], N)

def conditional_resample_batch(state: TapState, seed: SeedLike, count: int,
                               depth: Optional[int] = None) -> np.ndarray:
    """``count`` independent conditional draws, shape (count, N, N)"""
    depth = state.k if depth is None else validate_int_range(depth, 0, state.k, "depth")
    rng = make_rng(as_seed_record(seed))
    N = state.N
    G = rng.standard_normal((count, N, N)) / np.sqrt(N)
    return _complement_apply(G, state.phi[:depth], N)

def resample_seed(seed: SeedLike, batch: int) -> SeedRecord:
    return as_seed_record(seed, RESAMPLE_STREAM, batch)

def cavity_statistics(state: TapState, rule: Optional[QuadratureRule] = None) -> DistributionReport:
    """Empirical averages over the cavity field against their Gaussian limits"""
    if state.k < 1:
        raise InvalidArgumentError("State depth must be at least 1")
    rule = rule or default_rule()
    empirical, expected, gaps = {}, {}, {}
    for name, f in TEST_FUNCTIONS.items():
        empirical[name] = float(np.mean(f(state.hfield)))
        expected[name] = expect_field(f, state.params, state.q, rule)
        gaps[name] = abs(empirical[name] - expected[name])

    ip = state.ip
    phi_zeta = [float(ip.inner(state.phi[s], state.zeta[s])) for s in range(state.k)]
    norms = [ip.norm(state.zeta[s]) for s in range(state.k)]
    return DistributionReport(
        params=state.params,
        empirical=empirical,
        expected=expected,
        gaps=gaps,
        phi_zeta=phi_zeta,
        phi_zeta_reference_variance=2.0 / state.N,
        zeta_norms=norms,
        provenance=_provenance(state),
    )

def phi_zeta_variance(N: int, samples: int, seed: SeedLike) -> VarianceEstimate:
    """Sample variance of <phi^(1), zeta^(1)> = <1, gbar 1> over independent disorders"""
    validate_int_range(samples, 2, 10**7, "samples")
    values = np.empty(samples)
    for i in range(samples):
        d = disorder_for_draw(N, seed, i)
        values[i] = d.gbar.sum() / N
    variance = float(np.var(values, ddof=1))
    reference = 2.0 / N
    return VarianceEstimate(N=N, samples=samples, variance=variance,
                            reference=reference, ratio=variance / reference)

# Binary dump: fixed little-endian header followed by float64 arrays
DUMP_MAGIC = b"RSLABTAP"
DUMP_VERSION = 1
_HEADER = np.dtype([
    ("magic", "S8"),
    ("version", "<u4"),
    ("N", "<u4"),
    ("k", "<u4"),
    ("stream_len", "<u4"),
    ("seed", "<u8"),
    ("stream", "<i8", (4,)),
    ("beta", "<f8"),
    ("h", "<f8"),
    ("q", "<f8"),
    ("se_depth", "<u4"),
    ("order", "<u4"),
])

def save_tap_state(state: TapState, path: Union[str, Path]) -> Path:
    """Write the state as a header plus little-endian float64 arrays"""
    seed = state.disorder.seed
    stream = seed.stream if seed else ()
    if len(stream) > 4:
        raise InvalidArgumentError(f"Seed stream too deep to store: {stream}")
    header = np.zeros((), dtype=_HEADER)
    header["magic"] = DUMP_MAGIC
    header["version"] = DUMP_VERSION
    header["N"], header["k"] = state.N, state.k
    header["stream_len"] = len(stream)
    header["seed"] = seed.seed if seed else 0
    header["stream"][: len(stream)] = stream
    header["beta"], header["h"], header["q"] = state.params.beta, state.params.h, state.q
    header["se_depth"] = state.se.requested_depth
    header["order"] = state.se.provenance.quad_order or 0

    arrays = (state.disorder.g, state.gmod, state.phi, state.m, state.zeta, state.hfield,
              state.factors.a, state.factors.b, state.factors.c)
    path = Path(path)
    with path.open("wb") as handle:
        handle.write(header.tobytes())
        for array in arrays:
            handle.write(np.ascontiguousarray(array, dtype="<f8").tobytes())
    return path

def load_tap_state(path: Union[str, Path]) -> TapState:
    """Inverse of save_tap_state; the state-evolution table is recomputed"""
    raw = Path(path).read_bytes()
    header = np.frombuffer(raw, dtype=_HEADER, count=1)[0]
    if header["magic"] != DUMP_MAGIC or header["version"] != DUMP_VERSION:
        raise InvalidArgumentError(f"Not a TAP state dump: {path}")
    N, k = int(header["N"]), int(header["k"])
    shapes = [(N, N), (N, N), (k, N), (k + 1, N), (k, N), (N,), (k, N), (k, N), (k,)]

    offset = _HEADER.itemsize
    arrays = []
    for shape in shapes:
        count = int(np.prod(shape))
        arrays.append(np.frombuffer(raw, dtype="<f8", count=count, offset=offset)
                      .reshape(shape).astype(np.float64))
        offset += 8 * count

    stream = tuple(int(x) for x in header["stream"][: int(header["stream_len"])])
    seed = SeedRecord(seed=int(header["seed"]), stream=stream)
    params = ModelParams(beta=float(header["beta"]), h=float(header["h"]))
    q = float(header["q"])
    order = int(header["order"])
    rule = gauss_hermite_rule(order) if order else None
    g, gmod, phi, m, zeta, hfield, a, b, c = arrays
    return TapState(
        params=params,
        q=q,
        disorder=Disorder(g=g, seed=seed),
        phi=phi,
        m=m,
        zeta=zeta,
        hfield=hfield,
        gmod=gmod,
        factors=RankOneFactors(a=a, b=b, c=c),
        se=state_evolution(params, q, int(header["se_depth"]), rule),
    )
