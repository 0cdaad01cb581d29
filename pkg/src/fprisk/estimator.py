"""Closed-form risk estimators.

The chain is: pool per-disease false-positive rates from study counts, resolve
how many times a profile is screened for each disease over a lifetime, turn
(rate, occasions) into a per-disease lifetime risk, and combine the per-disease
risks into a single lifetime probability under independence. Odds ratios
compare two such probabilities.

All functions are pure and deterministic; uncertainty is the bootstrap
module's job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence

from .ingest import ScheduleConfig, ScheduleEntry, StudyRecord


class EstimationError(ValueError):
    pass


class ZeroDenominator(EstimationError):
    pass


class MixedDiseases(EstimationError):
    pass


class DomainError(EstimationError):
    pass


class MissingRate(EstimationError):
    pass


class DegenerateOdds(EstimationError):
    pass


@dataclass(frozen=True)
class DiseaseRate:
    """Pooled false-positive rate for one disease's screening procedure."""

    disease_id: str
    rate: float
    pooled_fp: int
    pooled_n: int
    se: Optional[float] = None

    def with_se(self, se: float) -> "DiseaseRate":
        return replace(self, se=se)


@dataclass(frozen=True)
class SubpopulationProfile:
    """Demographic/behavioral attributes that select a screening schedule.

    Female profiles vary by smoking status and expected lifetime pregnancies;
    male profiles by smoking status, MSM status, and whether routine prostate
    screening is elected.
    """

    sex: str
    smoker: bool = False
    pregnancies: int = 0
    msm: bool = False
    prostate_screening: bool = False

    def __post_init__(self):
        if self.sex not in ("female", "male"):
            raise ValueError(f"sex must be 'female' or 'male', got {self.sex!r}")
        if self.pregnancies < 0:
            raise ValueError("pregnancies must be >= 0")
        if self.sex == "male" and self.pregnancies != 0:
            raise ValueError("male profiles must have pregnancies = 0")
        if self.sex == "female" and (self.msm or self.prostate_screening):
            raise ValueError("msm/prostate_screening apply to male profiles only")


@dataclass(frozen=True)
class PerDiseaseRisk:
    disease_id: str
    occasions: int
    estimate: float
    se: Optional[float] = None


@dataclass(frozen=True)
class RiskEstimate:
    """Lifetime false-positive risk for one profile, by disease and in total."""

    profile: SubpopulationProfile
    per_disease: tuple[PerDiseaseRisk, ...]
    total: float
    total_se: Optional[float] = None

    @property
    def disease_set(self) -> tuple[str, ...]:
        """The diseases this profile is screened for at least once."""
        return tuple(r.disease_id for r in self.per_disease)

    def with_uncertainty(self, bootstrap_result) -> "RiskEstimate":
        """Copy with SE fields filled from a bootstrap run over this profile."""
        per = tuple(
            replace(r, se=bootstrap_result.per_pair_se[(self.profile, r.disease_id)])
            for r in self.per_disease
        )
        return replace(
            self, per_disease=per, total_se=bootstrap_result.total_se[self.profile]
        )


def pow_int(base: float, exponent: int) -> float:
    """base**exponent for integer exponent >= 0, by squaring."""
    if exponent < 0:
        raise DomainError("exponent must be >= 0")
    result = 1.0
    acc = base
    e = exponent
    while e > 0:
        if e & 1:
            result *= acc
        acc *= acc
        e >>= 1
    return result


def pool_rate(studies: Sequence[StudyRecord]) -> DiseaseRate:
    """Pool one disease's studies into a single false-positive rate.

    The estimate is (sum of false positives) / (sum of disease-free pool
    sizes) across studies; the integer numerator and denominator are kept on
    the result so the bootstrap can rebuild the same pool from resampled
    counts.
    """
    if not studies:
        raise ZeroDenominator("no studies to pool")
    disease_ids = {s.disease_id for s in studies}
    if len(disease_ids) != 1:
        raise MixedDiseases(f"studies span multiple diseases: {sorted(disease_ids)}")
    fp = sum(s.fp for s in studies)
    n = sum(s.negatives_n for s in studies)
    if n == 0:
        raise ZeroDenominator(
            f"disease {next(iter(disease_ids))!r} has no disease-free observations"
        )
    return DiseaseRate(next(iter(disease_ids)), fp / n, fp, n)


def pool_rates(studies: Sequence[StudyRecord]) -> dict[str, DiseaseRate]:
    """Group a full dataset by disease and pool each group (input order kept)."""
    by_disease: dict[str, list[StudyRecord]] = {}
    for s in studies:
        by_disease.setdefault(s.disease_id, []).append(s)
    return {d: pool_rate(group) for d, group in by_disease.items()}


def resolve_schedule(entry: ScheduleEntry, profile: SubpopulationProfile) -> int:
    """Resolve an entry to a lifetime occasion count for the given profile.

    Age-range entries count inclusive endpoints: floor((end-start)/interval)+1.
    Per-pregnancy extras are added `profile.pregnancies` times.
    """
    if entry.occasions is not None:
        base = entry.occasions
    else:
        base = int(math.floor((entry.end_age - entry.start_age) / entry.interval_years)) + 1
    return base + entry.per_pregnancy_occasions * profile.pregnancies


def lifetime_disease_risk(rate: float, occasions: int) -> float:
    """Probability of >=1 false positive in `occasions` independent screenings."""
    if not 0.0 <= rate <= 1.0:
        raise DomainError(f"rate must be in [0, 1], got {rate!r}")
    if occasions < 0:
        raise DomainError(f"occasions must be >= 0, got {occasions!r}")
    return 1.0 - pow_int(1.0 - rate, occasions)


def lifetime_total_risk(components: Iterable[tuple[float, int]]) -> float:
    """Probability of >=1 false positive across independent screening programs.

    Each component is a (rate, occasions) pair. A singleton reduces exactly to
    :func:`lifetime_disease_risk`; an empty collection is risk 0.
    """
    per = [lifetime_disease_risk(rate, occasions) for rate, occasions in components]
    return _combine(per)


def _combine(per_disease_risks: Sequence[float]) -> float:
    # The survival product is built from the same 1-P complements the caller
    # sees, so the complement identity holds to rounding of a single subtraction.
    if not per_disease_risks:
        return 0.0
    if len(per_disease_risks) == 1:
        return per_disease_risks[0]
    survival = 1.0
    for p in per_disease_risks:
        survival *= 1.0 - p
    return max(1.0 - survival, max(per_disease_risks))


def estimate_profile(
    profile: SubpopulationProfile,
    rates: Mapping[str, DiseaseRate],
    schedule: ScheduleConfig,
) -> RiskEstimate:
    """Full plug-in estimate for one profile against pooled rates and a schedule.

    The profile's disease set is every schedule entry that resolves to at
    least one occasion; each needs a pooled rate (else ``MissingRate``).
    SE fields stay unset until a bootstrap run fills them.
    """
    group = schedule_group(profile)
    per = []
    for entry in schedule.entries_for(group):
        occasions = resolve_schedule(entry, profile)
        if occasions < 1:
            continue
        rate = rates.get(entry.disease_id)
        if rate is None:
            raise MissingRate(
                f"no pooled rate for {entry.disease_id!r} required by {group!r}"
            )
        per.append(
            PerDiseaseRisk(
                disease_id=entry.disease_id,
                occasions=occasions,
                estimate=lifetime_disease_risk(rate.rate, occasions),
            )
        )
    total = _combine([r.estimate for r in per])
    return RiskEstimate(profile=profile, per_disease=tuple(per), total=total)


def odds_ratio(p1: float, p2: float) -> float:
    """Odds of the first probability relative to the second."""
    for p in (p1, p2):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability outside [0, 1]: {p!r}")
        if p in (0.0, 1.0):
            raise DegenerateOdds(f"odds undefined for probability {p}")
    return (p1 / (1.0 - p1)) / (p2 / (1.0 - p2))


# --- Canonical subpopulations -------------------------------------------------
#
# Schedules are keyed by the pregnancy-independent group; expected pregnancies
# enter through per-pregnancy extras on the female entries.

_MALE_GROUPS = {
    # (msm, smoker, prostate_screening)
    (False, False, False): "baseline_male",
    (True, False, False): "msm",
    (False, True, False): "male_smokers",
    (True, True, False): "msm_smokers",
    (False, False, True): "males_prostate",
    (True, False, True): "msm_prostate",
    (False, True, True): "male_smokers_prostate",
    (True, True, True): "msm_smokers_prostate",
}


def schedule_group(profile: SubpopulationProfile) -> str:
    """Map a profile to the schedule subpopulation id that governs it."""
    if profile.sex == "female":
        return "female_smokers" if profile.smoker else "baseline_female"
    return _MALE_GROUPS[(profile.msm, profile.smoker, profile.prostate_screening)]


@dataclass(frozen=True)
class CanonicalSubpopulation:
    label: str
    display_name: str
    profile: SubpopulationProfile


#: The 14 canonical subpopulations, in report order (females, then males).
CANONICAL_SUBPOPULATIONS: tuple[CanonicalSubpopulation, ...] = tuple(
    CanonicalSubpopulation(label, name, SubpopulationProfile(**kw))
    for label, name, kw in [
        ("baseline_female", "Baseline females", dict(sex="female")),
        ("females_one_pregnancy", "Females, one pregnancy", dict(sex="female", pregnancies=1)),
        ("females_two_pregnancies", "Females, two pregnancies", dict(sex="female", pregnancies=2)),
        ("female_smokers", "Female smokers", dict(sex="female", smoker=True)),
        ("female_smokers_one_pregnancy", "Female smokers, one pregnancy", dict(sex="female", smoker=True, pregnancies=1)),
        ("female_smokers_two_pregnancies", "Female smokers, two pregnancies", dict(sex="female", smoker=True, pregnancies=2)),
        ("baseline_male", "Baseline males", dict(sex="male")),
        ("msm", "Men who have sex with men (MSM)", dict(sex="male", msm=True)),
        ("male_smokers", "Male smokers", dict(sex="male", smoker=True)),
        ("msm_smokers", "MSM smokers", dict(sex="male", msm=True, smoker=True)),
        ("males_prostate", "Males, routine prostate exams", dict(sex="male", prostate_screening=True)),
        ("msm_prostate", "MSM, routine prostate exams", dict(sex="male", msm=True, prostate_screening=True)),
        ("male_smokers_prostate", "Male smokers, routine prostate exams", dict(sex="male", smoker=True, prostate_screening=True)),
        ("msm_smokers_prostate", "MSM smokers, routine prostate exams", dict(sex="male", msm=True, smoker=True, prostate_screening=True)),
    ]
)

CANONICAL_BY_LABEL: dict[str, CanonicalSubpopulation] = {
    c.label: c for c in CANONICAL_SUBPOPULATIONS
}
