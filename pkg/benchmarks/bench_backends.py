#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot paths (the bootstrap resampling pass and the lifetime
simulator) on the bundled dataset at a few sizes. The first numba call pays
JIT compilation; a warm-up run is excluded from the timings.

Usage: python benchmarks/bench_backends.py [--iterations 10000] [--lifetimes 1000000]
"""

import argparse
import os
import time

os.environ.setdefault("NUMBA_NUM_THREADS", str(max(os.cpu_count() or 1, 2)))

import fprisk
from fprisk.backend import BACKENDS
from fprisk.bootstrap import BootstrapConfig, run_bootstrap
from fprisk.oracle_sim import SimSpec, simulate_lifetimes


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iterations", type=int, default=10_000)
    parser.add_argument("--lifetimes", type=int, default=1_000_000)
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = parser.parse_args()

    records = fprisk.parse_study_csv(fprisk.bundled_studies_path().read_bytes())
    schedule = fprisk.parse_schedule_config(fprisk.bundled_schedule_path().read_bytes())
    profiles = [c.profile for c in fprisk.CANONICAL_SUBPOPULATIONS]
    spec = SimSpec(components=((0.049, 13), (0.05, 15), (0.113, 4)),
                   lifetimes=args.lifetimes, seed=1)

    print(f"{len(records)} studies, {len(profiles)} profiles, "
          f"B={args.iterations}, lifetimes={args.lifetimes}, workers={args.workers}")
    print(f"{'task':<26} {'backend':<8} {'seconds':>9}")

    rows = []
    for backend in BACKENDS:
        cfg = BootstrapConfig(iterations=args.iterations, seed=7)
        # warm-up: triggers JIT for numba, stream setup for numpy
        run_bootstrap(records, schedule, profiles,
                      BootstrapConfig(iterations=4, seed=0), backend=backend)
        simulate_lifetimes(SimSpec(components=((0.1, 2),), lifetimes=1000, seed=0),
                           backend=backend)

        t_boot = _time(lambda: run_bootstrap(
            records, schedule, profiles, cfg,
            workers=args.workers, backend=backend))
        t_sim = _time(lambda: simulate_lifetimes(
            spec, workers=args.workers, backend=backend))
        rows.append((backend, t_boot, t_sim))
        print(f"{'bootstrap (B=%d)' % args.iterations:<26} {backend:<8} {t_boot:>9.3f}")
        print(f"{'oracle (%.0e lifetimes)' % args.lifetimes:<26} {backend:<8} {t_sim:>9.3f}")

    if len(rows) == 2:
        (b0, boot0, sim0), (b1, boot1, sim1) = rows
        print(f"\nspeedup ({b0} vs {b1}): bootstrap x{boot1 / boot0:.1f}, "
              f"oracle x{sim1 / sim0:.1f}")


if __name__ == "__main__":
    main()
