"""Parametric bootstrap for the pooled-rate and lifetime-risk estimators.

Each study's confusion-matrix counts are refit as a three-cell multinomial
(false positive / true negative / positive class) and resampled B times; the
pooled rates and every profile's lifetime risks are recomputed per iteration
from the same draws, and standard errors use the B-1 denominator.

Determinism contract: every (iteration, study) pair owns its own keyed RNG
stream, so a fixed (seed, B, inputs, backend) triple gives bit-identical
results at any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import backend as _backend
from .estimator import (
    DiseaseRate,
    MissingRate,
    SubpopulationProfile,
    resolve_schedule,
    schedule_group,
)
from .ingest import ScheduleConfig, StudyRecord


class BootstrapError(ValueError):
    pass


class InvalidProbs(BootstrapError):
    pass


class InsufficientReplicates(BootstrapError):
    pass


class ZeroDenominatorInReplicate(BootstrapError):
    pass


@dataclass(frozen=True)
class BootstrapConfig:
    """Iteration count B (>= 2, default 10,000) and master seed."""

    iterations: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 2:
            raise InsufficientReplicates(
                f"need at least 2 iterations, got {self.iterations}"
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class ReplicateSummary:
    mean: float
    se: float


@dataclass(frozen=True)
class ReplicateArrays:
    """Raw replicate values, retained only on request (auditing/tests)."""

    disease_ids: tuple[str, ...]
    rates: np.ndarray  # shape (B, n_diseases)
    totals: dict[SubpopulationProfile, np.ndarray]  # each shape (B,)


@dataclass(frozen=True)
class BootstrapResult:
    """Standard errors from one bootstrap run, keyed by disease and profile."""

    per_disease_se: dict[str, float]
    per_pair_se: dict[tuple[SubpopulationProfile, str], float]
    total_se: dict[SubpopulationProfile, float]
    replicate_means: dict[SubpopulationProfile, float]
    iterations: int
    seed: int
    backend: str = field(default="", compare=False)
    replicates: Optional[ReplicateArrays] = field(
        default=None, compare=False, repr=False
    )


def summarize(replicates: Mapping) -> dict:
    """Mean and SE (B-1 denominator) for each replicate collection."""
    out = {}
    for key, values in replicates.items():
        arr = np.asarray(values, dtype=np.float64)
        if arr.size < 2:
            raise InsufficientReplicates(
                f"key {key!r} has {arr.size} replicate(s); need >= 2"
            )
        out[key] = ReplicateSummary(mean=float(arr.mean()), se=_se(arr))
    return out


def _se(arr: np.ndarray) -> float:
    # Constant replicates have SE exactly 0; the mean of a long constant
    # array is not bit-exact under pairwise summation, so short-circuit.
    if arr.max() == arr.min():
        return 0.0
    mean = arr.mean()
    return float(math.sqrt(float(((arr - mean) ** 2).sum()) / (arr.size - 1)))


def sample_multinomial(total: int, probs: Sequence[float], stream: np.random.Generator):
    """One draw from Multinomial(total; probs) via conditional binomials.

    `probs` are three non-negative cell probabilities summing to 1 (within
    1e-12); each marginal count is Binomial(total, prob_k) and the three
    counts sum to `total` exactly.
    """
    p = [float(x) for x in probs]
    if len(p) != 3 or any(x < 0.0 for x in p) or abs(sum(p) - 1.0) > 1e-12:
        raise InvalidProbs(f"probs must be 3 non-negative values summing to 1, got {probs!r}")
    if total < 0:
        raise InvalidProbs(f"total must be >= 0, got {total}")
    first = int(stream.binomial(total, p[0]))
    rem = total - first
    denom = 1.0 - p[0]
    second = int(stream.binomial(rem, min(p[1] / denom, 1.0))) if denom > 0.0 else 0
    return first, second, rem - second


def _study_arrays(studies: Sequence[StudyRecord]):
    """Pack studies into kernel arrays; diseases keep first-appearance order."""
    disease_ids: list[str] = []
    index: dict[str, int] = {}
    for s in studies:
        if s.disease_id not in index:
            index[s.disease_id] = len(disease_ids)
            disease_ids.append(s.disease_id)
    totals = np.array([s.total_n for s in studies], dtype=np.int64)
    fp = np.array([s.fp for s in studies], dtype=np.float64)
    tn = np.array([s.tn for s in studies], dtype=np.float64)
    p_fp = fp / totals
    p_tn = tn / totals
    disease_idx = np.array([index[s.disease_id] for s in studies], dtype=np.int64)
    return disease_ids, index, totals, p_fp, p_tn, disease_idx


def _pow_int_vec(base: np.ndarray, exponent: int) -> np.ndarray:
    # Same squaring sequence as estimator.pow_int, applied elementwise, so
    # replicate values match the scalar estimator bit-for-bit.
    result = np.ones_like(base)
    acc = base.copy()
    e = exponent
    while e > 0:
        if e & 1:
            result = result * acc
        acc = acc * acc
        e >>= 1
    return result


def _profile_pairs(profile, schedule, known_diseases) -> list[tuple[str, int]]:
    """The (disease_id, occasions) pairs in a profile's disease set."""
    pairs = []
    for entry in schedule.entries_for(schedule_group(profile)):
        occasions = resolve_schedule(entry, profile)
        if occasions < 1:
            continue
        if entry.disease_id not in known_diseases:
            raise MissingRate(
                f"no study data for {entry.disease_id!r} required by the "
                f"{schedule_group(profile)!r} schedule"
            )
        pairs.append((entry.disease_id, occasions))
    return pairs


def _run_kernel(kernels, workers, seed, iterations, totals, p_fp, p_tn, disease_idx, n_dis):
    if kernels.BACKEND_NAME == "numba":
        import numba

        previous = numba.get_num_threads()
        numba.set_num_threads(min(max(workers, 1), numba.config.NUMBA_NUM_THREADS))
        try:
            return kernels.bootstrap_rates(
                seed, iterations, totals, p_fp, p_tn, disease_idx, n_dis
            )
        finally:
            numba.set_num_threads(previous)
    if workers <= 1:
        return kernels.bootstrap_rates(
            seed, iterations, totals, p_fp, p_tn, disease_idx, n_dis
        )
    # Iterations own keyed streams, so any chunking reproduces the same rows.
    rates = np.empty((iterations, n_dis), dtype=np.float64)
    ok = np.ones(iterations, dtype=np.uint8)
    bounds = np.linspace(0, iterations, workers + 1, dtype=int)

    def fill(span):
        lo, hi = int(span[0]), int(span[1])
        if hi > lo:
            rates[lo:hi], ok[lo:hi] = kernels.bootstrap_rates_span(
                seed, lo, hi, totals, p_fp, p_tn, disease_idx, n_dis
            )

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(fill, zip(bounds[:-1], bounds[1:])))
    return rates, ok


def run_bootstrap(
    studies: Sequence[StudyRecord],
    schedule: Optional[ScheduleConfig],
    profiles: Sequence[SubpopulationProfile],
    config: BootstrapConfig,
    *,
    workers: int = 1,
    backend: Optional[str] = None,
    keep_replicates: bool = False,
) -> BootstrapResult:
    """Run the full resampling pass and return SEs for rates, pairs and totals.

    Pooled rates, per-disease lifetime risks, and per-profile totals are all
    recomputed per iteration from the same multinomial draws. Raises
    ``ZeroDenominatorInReplicate`` (with the iteration and disease named) if a
    replicate empties some disease's pooled denominator.
    """
    if profiles and schedule is None:
        raise ValueError("profiles were given but no schedule")
    kernels = _backend.get_kernels(backend)
    disease_ids, dis_index, totals, p_fp, p_tn, disease_idx = _study_arrays(studies)
    n_dis = len(disease_ids)

    rates_rep, ok = _run_kernel(
        kernels, workers, config.seed, config.iterations,
        totals, p_fp, p_tn, disease_idx, n_dis,
    )
    if not bool(np.all(ok)):
        bad_b = int(np.flatnonzero(ok == 0)[0])
        bad_d = disease_ids[int(np.flatnonzero(np.isnan(rates_rep[bad_b]))[0])]
        raise ZeroDenominatorInReplicate(
            f"iteration {bad_b} resampled an empty disease-free pool for "
            f"{bad_d!r}; the dataset is too sparse for a multinomial bootstrap"
        )

    per_disease_se = {
        disease_ids[d]: _se(rates_rep[:, d]) for d in range(n_dis)
    }

    per_pair_se: dict[tuple[SubpopulationProfile, str], float] = {}
    total_se: dict[SubpopulationProfile, float] = {}
    replicate_means: dict[SubpopulationProfile, float] = {}
    pair_cache: dict[tuple[int, int], np.ndarray] = {}
    totals_kept: dict[SubpopulationProfile, np.ndarray] = {}

    for profile in profiles:
        pairs = _profile_pairs(profile, schedule, dis_index)
        risk_cols = []
        for disease_id, occasions in pairs:
            key = (dis_index[disease_id], occasions)
            col = pair_cache.get(key)
            if col is None:
                base = 1.0 - rates_rep[:, key[0]]
                col = 1.0 - _pow_int_vec(base, occasions)
                pair_cache[key] = col
            risk_cols.append(col)
            per_pair_se[(profile, disease_id)] = _se(col)
        totals_rep = _combine_columns(risk_cols, config.iterations)
        total_se[profile] = _se(totals_rep)
        replicate_means[profile] = float(totals_rep.mean())
        if keep_replicates:
            totals_kept[profile] = totals_rep

    return BootstrapResult(
        per_disease_se=per_disease_se,
        per_pair_se=per_pair_se,
        total_se=total_se,
        replicate_means=replicate_means,
        iterations=config.iterations,
        seed=config.seed,
        backend=kernels.BACKEND_NAME,
        replicates=ReplicateArrays(
            disease_ids=tuple(disease_ids), rates=rates_rep, totals=totals_kept
        )
        if keep_replicates
        else None,
    )


def replicate_study_draws(
    studies: Sequence[StudyRecord],
    config: BootstrapConfig,
    iteration: int,
    *,
    backend: Optional[str] = None,
) -> list[StudyRecord]:
    """Rebuild the resampled study set of one bootstrap iteration.

    Feeding these records back through the estimator must reproduce that
    iteration's replicate values exactly; the positive class lands in `tp`
    (the fp/tn split is all the estimators read).
    """
    kernels = _backend.get_kernels(backend)
    _ids, _idx, totals, p_fp, p_tn, _didx = _study_arrays(studies)
    fp, tn, pos = kernels.replicate_counts(config.seed, iteration, totals, p_fp, p_tn)
    return [
        StudyRecord(
            orig.study_id,
            orig.disease_id,
            int(pos[s]),
            0,
            int(tn[s]),
            int(fp[s]),
            orig.source_label,
        )
        for s, orig in enumerate(studies)
    ]


def _combine_columns(risk_cols: list[np.ndarray], iterations: int) -> np.ndarray:
    # Mirrors estimator._combine elementwise (bit-for-bit).
    if not risk_cols:
        return np.zeros(iterations, dtype=np.float64)
    if len(risk_cols) == 1:
        return risk_cols[0]
    survival = np.ones(iterations, dtype=np.float64)
    peak = np.full(iterations, -np.inf)
    for col in risk_cols:
        survival = survival * (1.0 - col)
        peak = np.maximum(peak, col)
    return np.maximum(1.0 - survival, peak)
