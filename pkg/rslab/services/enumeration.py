"""Gray-code enumeration of {-1, 1}^N with incrementally maintained local fields.

Partition sums are accumulated in log space with a Kahan-compensated
running log-sum-exp. Every ``refresh`` flips the fields are recomputed from
scratch and the largest relative disagreement is reported as ``drift``.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from rslab.config import settings
from rslab.utils.validators import CapabilityError

logger = logging.getLogger(__name__)

@njit(cache=True)
def _lse_push(slot, x, mx, sm, cp):
    if x == -np.inf:
        return
    if x > mx[slot]:
        scale = math.exp(mx[slot] - x)
        sm[slot] *= scale
        cp[slot] *= scale
        mx[slot] = x
    y = math.exp(x - mx[slot]) - cp[slot]
    total = sm[slot] + y
    cp[slot] = (total - sm[slot]) - y
    sm[slot] = total

@njit(cache=True)
def _lse_value(slot, mx, sm):
    if sm[slot] <= 0.0:
        return -np.inf
    return mx[slot] + math.log(sm[slot])

@njit(cache=True)
def _lowest_set_bit(t):
    i = 0
    while (t >> i) & 1 == 0:
        i += 1
    return i

@njit(cache=True)
def _quadratic(A, sigma):
    return sigma @ (A @ sigma)

@njit(cache=True)
def _scan_log_partition(A, b, refresh):
    N = A.shape[0]
    sigma = np.ones(N)
    local = A @ sigma
    energy = _quadratic(A, sigma) + b @ sigma

    mx = np.full(1, -np.inf)
    sm = np.zeros(1)
    cp = np.zeros(1)
    _lse_push(0, energy, mx, sm, cp)
    drift = 0.0

    total = 1 << N
    for t in range(1, total):
        i = _lowest_set_bit(t)
        s = sigma[i]
        energy += -4.0 * s * local[i] + 4.0 * A[i, i] - 2.0 * b[i] * s
        for j in range(N):
            local[j] -= 2.0 * s * A[j, i]
        sigma[i] = -s

        if t % refresh == 0:
            fresh_local = A @ sigma
            fresh = _quadratic(A, sigma) + b @ sigma
            drift = max(drift, abs(fresh - energy) / max(1.0, abs(fresh)))
            energy = fresh
            local[:] = fresh_local

        _lse_push(0, energy, mx, sm, cp)

    return _lse_value(0, mx, sm), drift

@njit(cache=True)
def _scan_restricted(A_full, b_full, A_red, field, phi, center, radius, coef, log_norm, refresh):
    N = A_full.shape[0]
    k = phi.shape[0]
    sigma = np.ones(N)
    local_full = A_full @ sigma
    local_red = A_red @ sigma
    e_full = _quadratic(A_full, sigma) + b_full @ sigma
    e_red = _quadratic(A_red, sigma)
    tilt = field @ sigma
    proj = phi @ sigma / N

    # slots: 0 full Z, 1 p-mass of S, 2 first conditional moment, 3 reduced Z
    mx = np.full(4, -np.inf)
    sm = np.zeros(4)
    cp = np.zeros(4)
    min_corr = np.inf
    members = 0
    drift = 0.0

    total = 1 << N
    for t in range(total):
        if t > 0:
            i = _lowest_set_bit(t)
            s = sigma[i]
            e_full += -4.0 * s * local_full[i] + 4.0 * A_full[i, i] - 2.0 * b_full[i] * s
            e_red += -4.0 * s * local_red[i] + 4.0 * A_red[i, i]
            tilt -= 2.0 * s * field[i]
            for j in range(N):
                local_full[j] -= 2.0 * s * A_full[j, i]
                local_red[j] -= 2.0 * s * A_red[j, i]
            for r in range(k):
                proj[r] -= 2.0 * s * phi[r, i] / N
            sigma[i] = -s

            if t % refresh == 0:
                fresh_full = _quadratic(A_full, sigma) + b_full @ sigma
                fresh_red = _quadratic(A_red, sigma)
                drift = max(drift, abs(fresh_full - e_full) / max(1.0, abs(fresh_full)))
                drift = max(drift, abs(fresh_red - e_red) / max(1.0, abs(fresh_red)))
                e_full = fresh_full
                e_red = fresh_red
                local_full[:] = A_full @ sigma
                local_red[:] = A_red @ sigma
                tilt = field @ sigma
                proj[:] = phi @ sigma / N

        _lse_push(0, e_full, mx, sm, cp)

        inside = True
        norm2 = 0.0
        for r in range(k):
            if abs(proj[r] - center[r]) > radius:
                inside = False
                break
            norm2 += proj[r] * proj[r]
        if not inside:
            continue

        log_p = tilt - log_norm
        members += 1
        _lse_push(1, log_p, mx, sm, cp)
        complement = 1.0 - norm2
        _lse_push(2, log_p + coef * complement * complement, mx, sm, cp)
        _lse_push(3, log_p + e_red, mx, sm, cp)
        corr = (e_full - e_red - tilt) / N
        if corr < min_corr:
            min_corr = corr

    out = np.empty(4)
    for slot in range(4):
        out[slot] = _lse_value(slot, mx, sm)
    return out, min_corr, members, drift

@dataclass(frozen=True)
class RestrictedScan:
    """Log-sums over all of {-1,1}^N and over the restricted set S"""
    log_z: float
    log_mass: float
    log_first_moment: float
    log_reduced: float
    min_correction: float
    members: int
    drift: float

def require_size(N: int, limit: int, what: str) -> None:
    if N > limit:
        raise CapabilityError(f"N={N} exceeds the {what} limit of {limit}", size=N, limit=limit)

def _check_drift(drift: float) -> None:
    if drift > settings.field_drift_tolerance:
        logger.warning(f"Incremental field drift {drift:.3e} above tolerance")

def log_partition(A: np.ndarray, b: np.ndarray) -> tuple:
    """log sum_sigma exp(sigma^T A sigma + b.sigma) and the recorded drift"""
    N = A.shape[0]
    require_size(N, settings.max_enumeration_size, "enumeration")
    log_z, drift = _scan_log_partition(
        np.ascontiguousarray(A, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
        settings.field_refresh_interval,
    )
    _check_drift(drift)
    return float(log_z), float(drift)

def restricted_scan(A_full: np.ndarray, b_full: np.ndarray, A_red: np.ndarray,
                    field: np.ndarray, phi: np.ndarray, center: np.ndarray,
                    radius: float, coef: float, log_norm: float) -> RestrictedScan:
    """One Gray-code pass accumulating the full, restricted and reduced sums"""
    N = A_full.shape[0]
    require_size(N, settings.max_enumeration_size, "enumeration")
    f64 = lambda x: np.ascontiguousarray(x, dtype=np.float64)
    out, min_corr, members, drift = _scan_restricted(
        f64(A_full), f64(b_full), f64(A_red), f64(field), f64(np.atleast_2d(phi)),
        f64(center), float(radius), float(coef), float(log_norm),
        settings.field_refresh_interval,
    )
    _check_drift(drift)
    return RestrictedScan(
        log_z=float(out[0]),
        log_mass=float(out[1]),
        log_first_moment=float(out[2]),
        log_reduced=float(out[3]),
        min_correction=float(min_corr),
        members=int(members),
        drift=float(drift),
    )

def all_configurations(N: int) -> np.ndarray:
    """Every configuration of {-1, 1}^N as rows, bit j of the row index giving spin j"""
    require_size(N, settings.max_pair_enumeration_size, "dense enumeration")
    bits = (np.arange(1 << N)[:, None] >> np.arange(N)[None, :]) & 1
    return 2.0 * bits - 1.0
