"""Pure-numpy fallback kernels.

Same keyed-stream contract as the jitted backend: every bootstrap iteration
(and every simulated-lifetime chunk) owns a counter-based Philox stream keyed
by the master seed and its index, so results are bit-identical for a fixed
seed no matter how work is chunked or threaded. The random streams themselves
differ from the numba backend's, so the two backends agree statistically, not
bitwise.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

_ORACLE_CHUNK = 1 << 20


def _stream(seed: int, major: int, minor: int = 0) -> np.random.Generator:
    # 128-bit Philox key: master seed in one word, (minor, major) packed in
    # the other. major stays < 2**48 (iteration/chunk counters).
    word = np.uint64(major) + (np.uint64(minor) << np.uint64(48))
    key = np.array([np.uint64(seed), word], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _resample_iteration(rng, totals, p_fp, p_tn):
    # Conditional-binomial decomposition of Multinomial(N; p_fp, p_tn, rest),
    # vectorized across studies.
    fp = rng.binomial(totals, p_fp)
    rem = totals - fp
    denom = 1.0 - p_fp
    with np.errstate(divide="ignore", invalid="ignore"):
        p2 = np.where(denom > 0.0, p_tn / np.where(denom > 0.0, denom, 1.0), 0.0)
    p2 = np.clip(p2, 0.0, 1.0)
    tn = rng.binomial(rem, p2)
    return fp, tn, rem - tn


def bootstrap_rates_span(seed, lo, hi, totals, p_fp, p_tn, disease_idx, n_diseases):
    """Pooled-rate replicates for iterations [lo, hi); keys stay absolute."""
    rates = np.empty((hi - lo, n_diseases), dtype=np.float64)
    ok = np.ones(hi - lo, dtype=np.uint8)
    for b in range(lo, hi):
        rng = _stream(seed, b)
        fp, tn, _pos = _resample_iteration(rng, totals, p_fp, p_tn)
        fp_tot = np.bincount(disease_idx, weights=fp, minlength=n_diseases)
        n_tot = np.bincount(disease_idx, weights=fp + tn, minlength=n_diseases)
        empty = n_tot == 0
        if empty.any():
            ok[b - lo] = 0
        with np.errstate(divide="ignore", invalid="ignore"):
            rates[b - lo] = np.where(empty, np.nan, fp_tot / np.where(empty, 1.0, n_tot))
    return rates, ok


def bootstrap_rates(seed, iterations, totals, p_fp, p_tn, disease_idx, n_diseases):
    """Resample every study per iteration and pool per-disease rates."""
    return bootstrap_rates_span(
        seed, 0, iterations, totals, p_fp, p_tn, disease_idx, n_diseases
    )


def replicate_counts(seed, iteration, totals, p_fp, p_tn):
    """The exact per-study draws of one bootstrap iteration (for auditing)."""
    rng = _stream(seed, iteration)
    fp, tn, pos = _resample_iteration(rng, totals, p_fp, p_tn)
    return fp.astype(np.int64), tn.astype(np.int64), pos.astype(np.int64)


def oracle_hits(seed, lifetimes, rates, occasions):
    """Count lifetimes with >=1 false positive.

    Per component, the number of positive occasions in one lifetime is
    Binomial(T, rate) -- distributionally identical to T independent
    Bernoulli draws -- and only `count >= 1` matters.
    """
    hits = 0
    for chunk_index, start in enumerate(range(0, lifetimes, _ORACLE_CHUNK)):
        m = min(_ORACLE_CHUNK, lifetimes - start)
        rng = _stream(seed, chunk_index, 1)
        clean = np.ones(m, dtype=bool)
        for rate, t in zip(rates, occasions):
            clean &= rng.binomial(int(t), float(rate), size=m) == 0
        hits += int(m - clean.sum())
    return hits


def sample_binomial(seed: int, n: int, p: float, draws: int) -> np.ndarray:
    """Keyed batch of binomial draws (used by sampler validation tests)."""
    return _stream(seed, 0, 2).binomial(n, p, size=draws).astype(np.int64)
