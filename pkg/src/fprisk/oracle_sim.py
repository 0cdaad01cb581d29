"""Brute-force Monte Carlo check of the closed-form lifetime-risk formulas.

Simulates whole lifetimes occasion by occasion: every screening occasion of
every component is an independent Bernoulli trial, and a lifetime counts as
hit if any occasion anywhere comes up positive. The empirical hit fraction is
compared against the closed forms by the callers (tests, CLI `oracle`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import backend as _backend


@dataclass(frozen=True)
class SimSpec:
    """Components (rate, occasions), number of lifetimes, and master seed."""

    components: tuple[tuple[float, int], ...]
    lifetimes: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(
            self,
            "components",
            tuple((float(r), int(t)) for r, t in self.components),
        )
        for rate, occasions in self.components:
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"rate must be in [0, 1], got {rate!r}")
            if occasions < 0:
                raise ValueError(f"occasions must be >= 0, got {occasions!r}")
        if self.lifetimes < 1:
            raise ValueError("lifetimes must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class SimResult:
    hit_fraction: float
    mc_se: float
    lifetimes: int
    backend: str


def simulate_lifetimes(
    spec: SimSpec, *, workers: int = 1, backend: Optional[str] = None
) -> SimResult:
    """Fraction of simulated lifetimes with >=1 false positive, with MC SE."""
    kernels = _backend.get_kernels(backend)
    rates = np.array([r for r, _t in spec.components], dtype=np.float64)
    occasions = np.array([t for _r, t in spec.components], dtype=np.int64)

    if kernels.BACKEND_NAME == "numba":
        import numba

        previous = numba.get_num_threads()
        numba.set_num_threads(min(max(workers, 1), numba.config.NUMBA_NUM_THREADS))
        try:
            hits = int(kernels.oracle_hits(spec.seed, spec.lifetimes, rates, occasions))
        finally:
            numba.set_num_threads(previous)
    else:
        hits = int(kernels.oracle_hits(spec.seed, spec.lifetimes, rates, occasions))

    frac = hits / spec.lifetimes
    mc_se = math.sqrt(frac * (1.0 - frac) / spec.lifetimes)
    return SimResult(
        hit_fraction=frac, mc_se=mc_se, lifetimes=spec.lifetimes,
        backend=kernels.BACKEND_NAME,
    )


def closed_form(components: Sequence[tuple[float, int]]) -> float:
    """The analytic counterpart of :func:`simulate_lifetimes`."""
    from .estimator import lifetime_total_risk

    return lifetime_total_risk(components)
