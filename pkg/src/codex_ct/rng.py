"""Counter-based random streams for reproducible per-bin noise.

Every variate is a pure function of (seed, stream id, draw index), so
results do not depend on evaluation order, array chunking, or thread
count.  Uniforms come from a splitmix64-style avalanche hash; Poisson
variates use exact inverse-CDF search for small means and the PTRS
transformed-rejection sampler for large means.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

_PTRS_SWITCH = 10.0  # inversion below, transformed rejection at or above
_MAX_INVERSION_STEPS = 200
_MAX_PTRS_ATTEMPTS = 128


def _mix(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer; full-avalanche 64-bit hash (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = z + _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def counter_uniform(seed: int, stream, draw) -> np.ndarray:
    """Uniform in (0, 1) determined by (seed, stream, draw) alone."""
    s = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
    stream = np.asarray(stream, dtype=np.uint64)
    draw = np.asarray(draw, dtype=np.uint64)
    h = _mix(_mix(_mix(s) ^ stream) ^ draw)
    # 53 high bits, offset by half an ulp so 0 and 1 are excluded
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def poisson_counter(mean, seed: int, stream) -> np.ndarray:
    """Poisson draws with per-element counter streams.

    mean and stream must broadcast to the same shape; each element's
    value depends only on (seed, stream[...]) and its own mean.
    """
    mean = np.asarray(mean, dtype=np.float64)
    stream = np.asarray(stream, dtype=np.uint64)
    mean, stream = np.broadcast_arrays(mean, stream)
    if np.any(mean < 0) or not np.all(np.isfinite(mean)):
        raise ValueError("Poisson means must be finite and nonnegative")
    out = np.zeros(mean.shape, dtype=np.int64)
    small = mean < _PTRS_SWITCH
    if np.any(small):
        out[small] = _poisson_inversion(mean[small], seed, stream[small])
    if np.any(~small):
        out[~small] = _poisson_ptrs(mean[~small], seed, stream[~small])
    return out


def _poisson_inversion(lam, seed, stream):
    """Exact inverse-CDF search using one uniform per element."""
    u = counter_uniform(seed, stream, 0)
    k = np.zeros(lam.shape, dtype=np.int64)
    pmf = np.exp(-lam)
    cdf = pmf.copy()
    active = u > cdf
    steps = 0
    while np.any(active):
        steps += 1
        if steps > _MAX_INVERSION_STEPS:  # P < 1e-100 for lam < 10
            break
        k[active] += 1
        pmf[active] *= lam[active] / k[active]
        cdf[active] += pmf[active]
        active &= u > cdf
    return k


def _poisson_ptrs(lam, seed, stream):
    """PTRS transformed rejection (Hormann), valid for lam >= 10.

    Attempt t consumes uniforms (2t+1, 2t+2) of the element's stream, so
    rejection never couples neighboring elements.
    """
    loglam = np.log(lam)
    b = 0.931 + 2.53 * np.sqrt(lam)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)

    k = np.zeros(lam.shape, dtype=np.int64)
    pending = np.ones(lam.shape, dtype=bool)
    for t in range(_MAX_PTRS_ATTEMPTS):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        u = counter_uniform(seed, stream[idx], 2 * t + 1) - 0.5
        v = counter_uniform(seed, stream[idx], 2 * t + 2)
        us = 0.5 - np.abs(u)
        cand = np.floor((2.0 * a[idx] / us + b[idx]) * u + lam[idx] + 0.43)

        accept = (us >= 0.07) & (v <= v_r[idx])
        reject = (cand < 0) | ((us < 0.013) & (v > us))
        needs_test = ~(accept | reject)
        if np.any(needs_test):
            j = needs_test
            lhs = np.log(v[j] * inv_alpha[idx][j] / (a[idx][j] / us[j] ** 2 + b[idx][j]))
            rhs = cand[j] * loglam[idx][j] - lam[idx][j] - gammaln(cand[j] + 1.0)
            accept[j] = lhs <= rhs
        took = idx[accept]
        k[took] = cand[accept].astype(np.int64)
        pending[took] = False
    if np.any(pending):
        raise RuntimeError("PTRS sampler failed to accept within the attempt budget")
    return k
