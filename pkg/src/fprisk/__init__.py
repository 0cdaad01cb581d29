"""fprisk: lifetime false-positive risk estimation for routine screening.

Pools per-procedure false-positive rates from study-level confusion matrices,
projects them over guideline screening schedules to per-disease and total
lifetime risks for demographic subpopulations, and quantifies uncertainty with
a parametric multinomial bootstrap. A Monte Carlo lifetime simulator provides
an independent check of the closed forms.
"""

from importlib import resources as _resources
from pathlib import Path

from .bootstrap import (
    BootstrapConfig,
    BootstrapResult,
    run_bootstrap,
    sample_multinomial,
    summarize,
)
from .estimator import (
    CANONICAL_BY_LABEL,
    CANONICAL_SUBPOPULATIONS,
    DiseaseRate,
    RiskEstimate,
    SubpopulationProfile,
    estimate_profile,
    lifetime_disease_risk,
    lifetime_total_risk,
    odds_ratio,
    pool_rate,
    pool_rates,
    resolve_schedule,
    schedule_group,
)
from .ingest import (
    DISEASES,
    Disease,
    ScheduleConfig,
    ScheduleEntry,
    StudyRecord,
    parse_schedule_config,
    parse_study_csv,
    serialize_study_csv,
)
from .oracle_sim import SimResult, SimSpec, closed_form, simulate_lifetimes

__version__ = "0.1.0"


def bundled_studies_path() -> Path:
    """Path of the study-accuracy dataset shipped with the package."""
    return Path(str(_resources.files("fprisk") / "data" / "studies.csv"))


def bundled_schedule_path() -> Path:
    """Path of the screening-schedule config shipped with the package."""
    return Path(str(_resources.files("fprisk") / "data" / "schedule.json"))
