"""Numba-jitted hot kernels: keyed RNG streams, exact binomial/multinomial
sampling, the bootstrap resampling pass, and the lifetime simulator.

Every random draw comes from a splitmix64 stream keyed by
(master seed, iteration, study) or (master seed, lifetime), so results are
bit-identical for a fixed seed regardless of how iterations are scheduled
across threads.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

BACKEND_NAME = "numba"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_KEY_B = np.uint64(0xD1B54A32D192ED03)
_KEY_S = np.uint64(0x8CB92BA72F3D8DD7)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@nb.njit(nb.uint64(nb.uint64), cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@nb.njit(nb.uint64(nb.uint64, nb.int64, nb.int64), cache=True, inline="always")
def _stream_state(seed, major, minor):
    z = seed ^ (np.uint64(major) * _KEY_B) ^ (np.uint64(minor) * _KEY_S)
    z = _mix64(z + _GOLDEN)
    return _mix64(z + _GOLDEN)


@nb.njit(nb.types.Tuple((nb.uint64, nb.float64))(nb.uint64), cache=True, inline="always")
def _next_uniform(state):
    state = state + _GOLDEN
    z = _mix64(state)
    return state, (z >> np.uint64(11)) * _INV53


@nb.njit(nb.float64(nb.float64, nb.int64), cache=True)
def _pow_int(base, exponent):
    result = 1.0
    acc = base
    e = exponent
    while e > 0:
        if e & 1:
            result *= acc
        acc *= acc
        e >>= 1
    return result


@nb.njit(nb.types.Tuple((nb.uint64, nb.int64))(nb.uint64, nb.int64, nb.float64), cache=True)
def _binv(state, n, p):
    # Sequential CDF inversion; efficient only for small n*p.
    q = 1.0 - p
    s = p / q
    a = (n + 1) * s
    r = _pow_int(q, n)
    state, u = _next_uniform(state)
    x = np.int64(0)
    while u > r:
        u -= r
        x += 1
        if x > n:  # float round-off guard; mathematically unreachable
            x = n
            break
        r *= a / x - s
    return state, x


@nb.njit(nb.types.Tuple((nb.uint64, nb.int64))(nb.uint64, nb.int64, nb.float64), cache=True)
def _btrs(state, n, p):
    # Transformed-rejection sampler (Hormann's BTRS), exact for n*p >= 10.
    q = 1.0 - p
    spq = math.sqrt(n * p * q)
    b = 1.15 + 2.53 * spq
    a = -0.0873 + 0.0248 * b + 0.01 * p
    c = n * p + 0.5
    v_r = 0.92 - 4.2 / b
    alpha = (2.83 + 5.1 / b) * spq
    lpq = math.log(p / q)
    m = np.int64(math.floor((n + 1) * p))
    h = math.lgamma(m + 1.0) + math.lgamma(n - m + 1.0)
    while True:
        state, u = _next_uniform(state)
        u -= 0.5
        state, v = _next_uniform(state)
        us = 0.5 - abs(u)
        k = np.int64(math.floor((2.0 * a / us + b) * u + c))
        if us >= 0.07 and v <= v_r:
            return state, k
        if k < 0 or k > n:
            continue
        v = math.log(v * alpha / (a / (us * us) + b))
        if v <= h - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0) + (k - m) * lpq:
            return state, k


@nb.njit(nb.types.Tuple((nb.uint64, nb.int64))(nb.uint64, nb.int64, nb.float64), cache=True)
def _binomial(state, n, p):
    if n <= 0 or p <= 0.0:
        return state, np.int64(0)
    if p >= 1.0:
        return state, n
    flipped = p > 0.5
    ps = 1.0 - p if flipped else p
    if n * ps < 10.0:
        state, k = _binv(state, n, ps)
    else:
        state, k = _btrs(state, n, ps)
    if flipped:
        k = n - k
    return state, k


@nb.njit(
    nb.types.Tuple((nb.uint64, nb.int64, nb.int64, nb.int64))(
        nb.uint64, nb.int64, nb.float64, nb.float64
    ),
    cache=True,
)
def _multinomial3(state, n, p_fp, p_tn):
    # Conditional-binomial decomposition of Multinomial(n; p_fp, p_tn, rest).
    state, fp = _binomial(state, n, p_fp)
    rem = n - fp
    denom = 1.0 - p_fp
    if denom <= 0.0:
        return state, fp, np.int64(0), np.int64(0)
    p2 = p_tn / denom
    if p2 > 1.0:
        p2 = 1.0
    state, tn = _binomial(state, rem, p2)
    return state, fp, tn, rem - tn


@nb.njit(
    nb.types.Tuple((nb.float64[:, :], nb.uint8[:]))(
        nb.uint64, nb.int64, nb.int64[:], nb.float64[:], nb.float64[:], nb.int64[:], nb.int64
    ),
    cache=True,
    parallel=True,
)
def bootstrap_rates(seed, iterations, totals, p_fp, p_tn, disease_idx, n_diseases):
    """Resample every study per iteration and pool per-disease rates.

    Returns (rates[iterations, n_diseases], ok[iterations]); an iteration is
    flagged not-ok when some disease's resampled disease-free pool is empty
    (its rate cell is NaN).
    """
    n_studies = totals.shape[0]
    rates = np.empty((iterations, n_diseases), dtype=np.float64)
    ok = np.ones(iterations, dtype=np.uint8)
    for b in nb.prange(iterations):
        fp_tot = np.zeros(n_diseases, dtype=np.int64)
        n_tot = np.zeros(n_diseases, dtype=np.int64)
        for s in range(n_studies):
            state = _stream_state(seed, b, s)
            state, fp, tn, _pos = _multinomial3(state, totals[s], p_fp[s], p_tn[s])
            d = disease_idx[s]
            fp_tot[d] += fp
            n_tot[d] += fp + tn
        for d in range(n_diseases):
            if n_tot[d] == 0:
                ok[b] = 0
                rates[b, d] = np.nan
            else:
                rates[b, d] = fp_tot[d] / n_tot[d]
    return rates, ok


@nb.njit(
    nb.types.Tuple((nb.int64[:], nb.int64[:], nb.int64[:]))(
        nb.uint64, nb.int64, nb.int64[:], nb.float64[:], nb.float64[:]
    ),
    cache=True,
)
def replicate_counts(seed, iteration, totals, p_fp, p_tn):
    """The exact per-study draws of one bootstrap iteration (for auditing)."""
    n_studies = totals.shape[0]
    fp_out = np.empty(n_studies, dtype=np.int64)
    tn_out = np.empty(n_studies, dtype=np.int64)
    pos_out = np.empty(n_studies, dtype=np.int64)
    for s in range(n_studies):
        state = _stream_state(seed, iteration, s)
        state, fp, tn, pos = _multinomial3(state, totals[s], p_fp[s], p_tn[s])
        fp_out[s] = fp
        tn_out[s] = tn
        pos_out[s] = pos
    return fp_out, tn_out, pos_out


@nb.njit(nb.int64(nb.uint64, nb.int64, nb.float64[:], nb.int64[:]), cache=True, parallel=True)
def oracle_hits(seed, lifetimes, rates, occasions):
    """Count lifetimes with >=1 false positive, one Bernoulli per occasion."""
    n_components = rates.shape[0]
    hits = np.int64(0)
    for i in nb.prange(lifetimes):
        state = _stream_state(seed, i, 0)
        hit = np.int64(0)
        for c in range(n_components):
            rate = rates[c]
            for _t in range(occasions[c]):
                state, u = _next_uniform(state)
                if u < rate:
                    hit = 1
                    break
            if hit == 1:
                break
        hits += hit
    return hits


def sample_binomial(seed: int, n: int, p: float, draws: int) -> np.ndarray:
    """Keyed batch of binomial draws (used by sampler validation tests)."""
    out = np.empty(draws, dtype=np.int64)
    for i in range(draws):
        state = _stream_state(np.uint64(seed), i, 0)
        _state, k = _binomial(state, n, p)
        out[i] = k
    return out
