"""HTTP/JSON API for disease rates, the subpopulation registry, and profile
risk estimates.

The dataset is loaded and the 14 canonical subpopulations (with bootstrap SEs)
are precomputed once at startup; request-time bootstraps only happen for
custom (iterations, seed) parameters and are capped. Handlers are stateless
over an immutable snapshot, so identical requests return identical bodies.
"""

from __future__ import annotations

import hashlib
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import bundled_schedule_path, bundled_studies_path
from .bootstrap import BootstrapConfig, run_bootstrap
from .estimator import (
    CANONICAL_SUBPOPULATIONS,
    SubpopulationProfile,
    estimate_profile,
    pool_rates,
)
from .ingest import DISEASES, parse_schedule_config, parse_study_csv


class BootstrapParams(BaseModel):
    iterations: int = Field(default=10_000, ge=2)
    seed: int = Field(default=0, ge=0)


class EstimateRequest(BaseModel):
    sex: Literal["female", "male"]
    smoker: bool = False
    pregnancies: int = Field(default=0, ge=0)
    msm: bool = False
    prostate_screening: bool = False
    bootstrap: Optional[BootstrapParams] = None


def _profile_or_400(req: EstimateRequest) -> SubpopulationProfile:
    problems = []
    if req.sex == "male" and req.pregnancies != 0:
        problems.append({"field": "pregnancies", "message": "male profiles must have pregnancies = 0"})
    if req.sex == "female" and req.msm:
        problems.append({"field": "msm", "message": "msm applies to male profiles only"})
    if req.sex == "female" and req.prostate_screening:
        problems.append({"field": "prostate_screening", "message": "prostate_screening applies to male profiles only"})
    if problems:
        raise HTTPException(status_code=400, detail=problems)
    return SubpopulationProfile(
        sex=req.sex,
        smoker=req.smoker,
        pregnancies=req.pregnancies,
        msm=req.msm,
        prostate_screening=req.prostate_screening,
    )


def create_app(
    studies_path: Optional[Path] = None,
    schedule_path: Optional[Path] = None,
    *,
    bootstrap_cap: int = 10_000,
    startup_iterations: int = 10_000,
    startup_seed: int = 20210831,
    ui_origin: Optional[str] = None,
    backend: Optional[str] = None,
    workers: int = 1,
) -> FastAPI:
    """Build the service app; dataset loading happens in the lifespan hook."""
    studies_path = Path(studies_path or bundled_studies_path())
    schedule_path = Path(schedule_path or bundled_schedule_path())

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        raw = studies_path.read_bytes()
        records = parse_study_csv(raw)
        schedule = parse_schedule_config(schedule_path.read_bytes())
        rates = pool_rates(records)
        profiles = [c.profile for c in CANONICAL_SUBPOPULATIONS]
        boot = run_bootstrap(
            records,
            schedule,
            profiles,
            BootstrapConfig(iterations=startup_iterations, seed=startup_seed),
            workers=workers,
            backend=backend,
        )
        state = app.state
        state.records = records
        state.dataset_version = hashlib.sha256(raw).hexdigest()
        state.schedule = schedule
        state.rates = rates
        state.startup_boot = boot
        # POST bodies carry SEs only when the request asks for a bootstrap;
        # the startup SEs are published via /api/subpopulations.
        state.estimate_cache = {
            c.profile: _estimate_body(state, c.profile, None)
            for c in CANONICAL_SUBPOPULATIONS
        }
        state.subpop_cache = [
            {
                "label": c.label,
                "display_name": c.display_name,
                "profile": _profile_fields(c.profile),
                **_estimate_body(state, c.profile, boot),
            }
            for c in CANONICAL_SUBPOPULATIONS
        ]
        state.ready = True
        yield

    app = FastAPI(title="fprisk", lifespan=lifespan)
    app.state.ready = False
    app.state.bootstrap_cap = bootstrap_cap
    app.state.backend = backend
    app.state.workers = workers

    if ui_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[ui_origin],
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    def _require_ready():
        if not app.state.ready:
            raise HTTPException(status_code=503, detail="dataset not loaded yet")

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/diseases")
    def diseases():
        _require_ready()
        state = app.state
        return {
            "dataset_version": state.dataset_version,
            "diseases": [
                {
                    "disease_id": d,
                    "display_name": DISEASES[d].display_name,
                    "procedure": DISEASES[d].procedure_name,
                    "rate": state.rates[d].rate,
                    "se": state.startup_boot.per_disease_se[d],
                    "pooled_fp": state.rates[d].pooled_fp,
                    "pooled_n": state.rates[d].pooled_n,
                }
                for d in DISEASES
                if d in state.rates
            ],
        }

    @app.get("/api/subpopulations")
    def subpopulations():
        _require_ready()
        state = app.state
        return {
            "dataset_version": state.dataset_version,
            "schedule_version": state.schedule.version_label,
            "subpopulations": state.subpop_cache,
        }

    @app.post("/api/estimate")
    def estimate(req: EstimateRequest):
        _require_ready()
        state = app.state
        profile = _profile_or_400(req)
        if req.bootstrap is None and profile in state.estimate_cache:
            return state.estimate_cache[profile]
        boot = None
        if req.bootstrap is not None:
            if req.bootstrap.iterations > state.bootstrap_cap:
                raise HTTPException(
                    status_code=422,
                    detail=f"iterations above the configured cap of {state.bootstrap_cap}",
                )
            boot = run_bootstrap(
                state.records,
                state.schedule,
                [profile],
                BootstrapConfig(iterations=req.bootstrap.iterations, seed=req.bootstrap.seed),
                workers=state.workers,
                backend=state.backend,
            )
        return _estimate_body(state, profile, boot)

    return app


def _profile_fields(profile: SubpopulationProfile) -> dict:
    return {
        "sex": profile.sex,
        "smoker": profile.smoker,
        "pregnancies": profile.pregnancies,
        "msm": profile.msm,
        "prostate_screening": profile.prostate_screening,
    }


def _estimate_body(state, profile: SubpopulationProfile, boot) -> dict:
    est = estimate_profile(profile, state.rates, state.schedule)
    per = [
        {
            "disease_id": r.disease_id,
            "display_name": DISEASES[r.disease_id].display_name,
            "occasions": r.occasions,
            "estimate": r.estimate,
            "se": boot.per_pair_se[(profile, r.disease_id)] if boot else None,
        }
        for r in est.per_disease
    ]
    per.sort(key=lambda row: -row["estimate"])
    return {
        "total": {
            "estimate": est.total,
            "se": boot.total_se[profile] if boot else None,
        },
        "per_disease": per,
        "metadata": {
            "dataset_version": state.dataset_version,
            "schedule_version": state.schedule.version_label,
            "iterations": boot.iterations if boot else None,
            "seed": boot.seed if boot else None,
            "backend": boot.backend if boot else None,
            "extrapolated": profile.pregnancies > 2,
        },
    }
