"""Command-line front end: pooled rates, profile estimates, oracle checks,
and the JSON service launcher.

Exit codes: 0 success, 2 parse error, 3 estimation error, 4 usage error.
stdout carries only the report; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__, bundled_schedule_path, bundled_studies_path
from .bootstrap import BootstrapConfig, BootstrapError, run_bootstrap
from .estimator import (
    CANONICAL_BY_LABEL,
    CANONICAL_SUBPOPULATIONS,
    EstimationError,
    SubpopulationProfile,
    estimate_profile,
    odds_ratio,
    pool_rates,
)
from .ingest import DISEASES, ParseError, parse_schedule_config, parse_study_csv
from .oracle_sim import SimSpec, closed_form, simulate_lifetimes

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_ESTIMATION = 3
EXIT_USAGE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; this tool reserves 2 for parse errors.
    def error(self, message):
        raise UsageError(message)


def _percent(x, digits=1):
    return f"{100.0 * x:.{digits}f}%"


def _read_file(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}")


def _load_dataset(args):
    raw = _read_file(args.studies)
    records = parse_study_csv(raw)
    return records, hashlib.sha256(raw).hexdigest()


def _load_schedule(args):
    return parse_schedule_config(_read_file(args.schedule))


def _emit_json(doc):
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _bootstrap_config(args):
    if args.bootstrap is None:
        return None
    return BootstrapConfig(iterations=args.bootstrap, seed=args.seed)


def cmd_rates(args) -> int:
    records, dataset_hash = _load_dataset(args)
    rates = pool_rates(records)
    boot = None
    cfg = _bootstrap_config(args)
    if cfg is not None:
        boot = run_bootstrap(records, None, [], cfg, workers=args.workers)
        rates = {
            d: r.with_se(boot.per_disease_se[d]) for d, r in rates.items()
        }
    rows = [
        {
            "disease_id": d,
            "display_name": DISEASES[d].display_name,
            "procedure": DISEASES[d].procedure_name,
            "rate": rates[d].rate,
            "se": rates[d].se,
            "pooled_fp": rates[d].pooled_fp,
            "pooled_n": rates[d].pooled_n,
        }
        for d in sorted(rates)
    ]
    if args.format == "json":
        _emit_json(
            {
                "disease_rates": rows,
                "metadata": _metadata(dataset_hash, None, boot),
            }
        )
    else:
        print(f"{'Disease':<20} {'Procedure':<24} {'Rate':>7} {'SE':>7}")
        for row in rows:
            se = _percent(row["se"]) if row["se"] is not None else "-"
            print(
                f"{row['display_name']:<20} {row['procedure']:<24} "
                f"{_percent(row['rate']):>7} {se:>7}"
            )
    return EXIT_OK


def _metadata(dataset_hash, schedule, boot):
    meta = {"dataset_sha256": dataset_hash, "tool_version": __version__}
    if schedule is not None:
        meta["schedule_version"] = schedule.version_label
    if boot is not None:
        meta["iterations"] = boot.iterations
        meta["seed"] = boot.seed
        meta["backend"] = boot.backend
    return meta


def _profile_from_flags(args) -> SubpopulationProfile:
    if args.sex is None:
        raise UsageError("either --all or --sex is required")
    try:
        return SubpopulationProfile(
            sex=args.sex,
            smoker=args.smoker,
            pregnancies=args.pregnancies,
            msm=args.msm,
            prostate_screening=args.prostate_screening,
        )
    except ValueError as exc:
        raise UsageError(f"contradictory profile flags: {exc}")


def cmd_estimate(args) -> int:
    records, dataset_hash = _load_dataset(args)
    schedule = _load_schedule(args)
    rates = pool_rates(records)

    if args.all:
        selected = [(c.label, c.display_name, c.profile) for c in CANONICAL_SUBPOPULATIONS]
    elif args.sex is not None:
        profile = _profile_from_flags(args)
        selected = [("custom", "Custom profile", profile)]
    elif args.compare:
        selected = []
    else:
        raise UsageError("one of --all, --sex or --compare is required")

    compare_labels = args.compare or []
    for label in compare_labels:
        if label not in CANONICAL_BY_LABEL:
            raise UsageError(
                f"unknown subpopulation {label!r}; choose from "
                f"{', '.join(CANONICAL_BY_LABEL)}"
            )
    for label in compare_labels:
        if label not in [s[0] for s in selected]:
            c = CANONICAL_BY_LABEL[label]
            selected.append((c.label, c.display_name, c.profile))

    estimates = {
        label: estimate_profile(profile, rates, schedule)
        for label, _name, profile in selected
    }

    boot = None
    cfg = _bootstrap_config(args)
    if cfg is not None:
        boot = run_bootstrap(
            records, schedule, [p for _l, _n, p in selected], cfg, workers=args.workers
        )

    rows = []
    for label, display_name, profile in selected:
        est = estimates[label]
        per = []
        for r in est.per_disease:
            se = boot.per_pair_se[(profile, r.disease_id)] if boot else None
            per.append(
                {
                    "disease_id": r.disease_id,
                    "display_name": DISEASES[r.disease_id].display_name,
                    "occasions": r.occasions,
                    "estimate": r.estimate,
                    "se": se,
                }
            )
        rows.append(
            {
                "label": label,
                "display_name": display_name,
                "profile": {
                    "sex": profile.sex,
                    "smoker": profile.smoker,
                    "pregnancies": profile.pregnancies,
                    "msm": profile.msm,
                    "prostate_screening": profile.prostate_screening,
                },
                "total": est.total,
                "total_se": boot.total_se[profile] if boot else None,
                "per_disease": per,
            }
        )

    ratios = []
    if len(compare_labels) == 2:
        a, b = compare_labels
        ratios.append(
            {
                "numerator": a,
                "denominator": b,
                "odds_ratio": odds_ratio(estimates[a].total, estimates[b].total),
            }
        )

    if args.format == "json":
        doc = {
            "profile_risks": rows,
            "metadata": _metadata(dataset_hash, schedule, boot),
        }
        if ratios:
            doc["odds_ratios"] = ratios
        _emit_json(doc)
    else:
        print(f"{'Subpopulation':<40} {'Estimate':>9} {'SE':>7}")
        for row in rows:
            se = _percent(row["total_se"]) if row["total_se"] is not None else "-"
            print(f"{row['display_name']:<40} {_percent(row['total']):>9} {se:>7}")
        for ratio in ratios:
            print(
                f"Odds ratio {ratio['numerator']} vs {ratio['denominator']}: "
                f"{ratio['odds_ratio']:.2f}"
            )
    return EXIT_OK


def _parse_components(args):
    components = []
    if args.rate is not None or args.occasions is not None:
        if args.rate is None or args.occasions is None:
            raise UsageError("--rate and --occasions must be given together")
        components.append((args.rate, args.occasions))
    for text in args.component or []:
        try:
            rate_text, occ_text = text.split(":")
            components.append((float(rate_text), int(occ_text)))
        except ValueError:
            raise UsageError(f"--component must look like RATE:OCCASIONS, got {text!r}")
    if not components:
        raise UsageError("give --rate/--occasions or at least one --component")
    return components


def cmd_oracle(args) -> int:
    components = _parse_components(args)
    try:
        spec = SimSpec(components=tuple(components), lifetimes=args.lifetimes, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    result = simulate_lifetimes(spec, workers=args.workers)
    analytic = closed_form(spec.components)
    diff = abs(result.hit_fraction - analytic)
    passed = diff <= 3.0 * result.mc_se
    print(f"components      : {list(spec.components)}")
    print(f"lifetimes       : {spec.lifetimes}")
    print(f"simulated       : {result.hit_fraction!r}")
    print(f"monte carlo se  : {result.mc_se!r}")
    print(f"closed form     : {analytic!r}")
    print(f"abs difference  : {diff!r}")
    print(f"verdict         : {'PASS' if passed else 'FAIL'} (|diff| <= 3*mc_se)")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        studies_path=args.studies,
        schedule_path=args.schedule,
        bootstrap_cap=args.bootstrap_cap,
        startup_iterations=args.startup_iterations,
        startup_seed=args.seed,
        ui_origin=args.ui_origin,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fprisk", description=__doc__)
    parser.add_argument("--version", action="version", version=f"fprisk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, schedule=False):
        p.add_argument("--studies", type=Path, default=bundled_studies_path(),
                       help="study-accuracy CSV (default: bundled dataset)")
        if schedule:
            p.add_argument("--schedule", type=Path, default=bundled_schedule_path(),
                           help="screening schedule JSON (default: bundled)")
        p.add_argument("--seed", type=int, default=0, help="bootstrap master seed")
        p.add_argument("--bootstrap", type=int, metavar="B",
                       help="bootstrap iterations for standard errors")
        p.add_argument("--workers", type=int, default=1, help="worker threads")
        p.add_argument("--format", choices=("json", "table"), default="table")

    p_rates = sub.add_parser("rates", help="pooled per-disease false-positive rates")
    common(p_rates)
    p_rates.set_defaults(func=cmd_rates)

    p_est = sub.add_parser("estimate", help="lifetime risk for subpopulations")
    common(p_est, schedule=True)
    p_est.add_argument("--all", action="store_true",
                       help="estimate all 14 canonical subpopulations")
    p_est.add_argument("--sex", choices=("female", "male"))
    p_est.add_argument("--smoker", action=argparse.BooleanOptionalAction, default=False)
    p_est.add_argument("--pregnancies", type=int, default=0)
    p_est.add_argument("--msm", action=argparse.BooleanOptionalAction, default=False)
    p_est.add_argument("--prostate-screening", action=argparse.BooleanOptionalAction,
                       default=False)
    p_est.add_argument("--compare", nargs=2, metavar=("A", "B"),
                       help="print the odds ratio of two canonical subpopulations")
    p_est.set_defaults(func=cmd_estimate)

    p_oracle = sub.add_parser("oracle", help="Monte Carlo check of the closed forms")
    p_oracle.add_argument("--rate", type=float)
    p_oracle.add_argument("--occasions", type=int)
    p_oracle.add_argument("--component", action="append", metavar="RATE:OCCASIONS")
    p_oracle.add_argument("--lifetimes", type=int, default=1_000_000)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--workers", type=int, default=1)
    p_oracle.set_defaults(func=cmd_oracle)

    p_serve = sub.add_parser("serve", help="run the JSON estimate service")
    p_serve.add_argument("--studies", type=Path, default=bundled_studies_path())
    p_serve.add_argument("--schedule", type=Path, default=bundled_schedule_path())
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--bootstrap-cap", type=int, default=10_000)
    p_serve.add_argument("--startup-iterations", type=int, default=10_000)
    p_serve.add_argument("--seed", type=int, default=20210831)
    p_serve.add_argument("--ui-origin", help="origin allowed for CORS")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (EstimationError, BootstrapError) as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION


if __name__ == "__main__":
    sys.exit(main())
