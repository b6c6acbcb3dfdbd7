"""Command-line interface: ``st2e select|tune|benchmark``.

Exit codes: 0 success, 2 bad usage or bad input data, 1 internal failure.
Reports go to ``--out`` (JSON or CSV), human-readable tables to standard
output, and progress/timing lines to standard error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

from .benchmark import run_benchmark
from .ensemble import build_ensemble, tune_kappa
from .io import MissingResponse, ParseError, ingest_csv
from .linear_model import RankDeficient, TooManyVariables
from .reports import (
    benchmark_json_dict,
    dump_json,
    make_selection_report,
    tuning_curve_csv,
)
from .rng import mix64, substream
from .scenarios import NotPositiveDefinite, UnknownScenario, builtin_scenario, generate
from .screening import ScreeningConfig, ZeroVarianceResponse
from .search import ST2Config

DEFAULT_KAPPA = math.e
DEFAULT_LAM = 0.5
SCENARIO_NAMES = ("motivating", "benchmark8", "corr40", "largep120")

# Everything here reflects a problem with the invocation or the data, not
# a bug: these map to exit code 2.
_INPUT_ERRORS = (
    ParseError,
    MissingResponse,
    UnknownScenario,
    NotPositiveDefinite,
    ZeroVarianceResponse,
    TooManyVariables,
    RankDeficient,
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    ValueError,
)


def _add_kappa_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--kappa", type=float, help="greediness parameter (> 1)")
    group.add_argument(
        "--auto-tune",
        action="store_true",
        help="choose kappa at the diversity peak of a grid sweep",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="st2e",
        description="Stochastic stepwise ensembles for variable selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    select = sub.add_parser("select", help="rank and select variables on a CSV dataset")
    select.add_argument("--data", required=True, help="CSV file with a header row")
    select.add_argument("--response", required=True, help="response column name")
    _add_kappa_flags(select)
    select.add_argument("--ensemble-size", type=int, default=300, metavar="B")
    select.add_argument("--seed", type=int, default=0)
    select.add_argument("--threshold", choices=("mean", "none"), default="mean")
    select.add_argument(
        "--sis", type=int, metavar="Q", help="screen to Q variables per path"
    )
    select.add_argument("--standardize", action="store_true")
    select.add_argument("--out", help="write the JSON report here")
    select.set_defaults(func=cmd_select)

    tune = sub.add_parser("tune", help="sweep kappa and report diversity/strength")
    source = tune.add_mutually_exclusive_group(required=True)
    source.add_argument("--data", help="CSV file with a header row")
    source.add_argument("--scenario", choices=SCENARIO_NAMES)
    tune.add_argument("--response", help="response column name (with --data)")
    tune.add_argument("--grid", help="comma-separated kappa values (each > 1)")
    tune.add_argument("--ensemble-size", type=int, default=100, metavar="B")
    tune.add_argument("--seed", type=int, default=0)
    tune.add_argument("--alpha", type=float, help="motivating scenario only")
    tune.add_argument("--n", type=int, help="scenario sample-size override")
    tune.add_argument("--sigma", type=float, help="scenario noise override")
    tune.add_argument("--out", help="write the CSV curve here")
    tune.set_defaults(func=cmd_tune)

    bench = sub.add_parser("benchmark", help="replicate a simulation scenario")
    bench.add_argument("--scenario", required=True, choices=SCENARIO_NAMES)
    bench.add_argument("--alpha", type=float, help="motivating scenario only")
    bench.add_argument("--n", type=int, help="scenario sample-size override")
    bench.add_argument("--sigma", type=float, help="scenario noise override")
    bench.add_argument("--reps", type=int, default=100)
    bench.add_argument("--ensemble-size", type=int, default=300, metavar="B")
    _add_kappa_flags(bench)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument(
        "--sis",
        type=int,
        metavar="Q",
        help="screen to Q variables per path (largep120 defaults to n-1)",
    )
    bench.add_argument("--out", help="write the JSON summary here")
    bench.set_defaults(func=cmd_benchmark)
    return parser


def cmd_select(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    dataset = ingest_csv(args.data, args.response, standardize=args.standardize)
    screening = None
    if args.sis is not None:
        screening = ScreeningConfig(q=args.sis)
        screening.validate(dataset.n, dataset.p)
    if args.kappa is not None:
        kappa = args.kappa
    elif args.auto_tune:
        curve = tune_kappa(
            dataset, master_seed=mix64(args.seed, 1), screening=screening
        )
        kappa = curve.chosen_kappa
    else:
        kappa = DEFAULT_KAPPA
    ensemble = build_ensemble(
        dataset,
        ST2Config(kappa=kappa, lam=DEFAULT_LAM),
        args.ensemble_size,
        master_seed=args.seed,
        screening=screening,
    )
    config = {
        "command": "select",
        "data": args.data,
        "response": args.response,
        "ensemble_size": args.ensemble_size,
        "kappa": float(kappa),
        "auto_tuned": bool(args.auto_tune),
        "lam": DEFAULT_LAM,
        "seed": args.seed,
        "threshold": args.threshold,
        "standardize": bool(args.standardize),
        "screening_q": screening.q if screening is not None else None,
    }
    report = make_selection_report(
        dataset.names,
        ensemble,
        config,
        threshold=args.threshold,
        timing_seconds=time.perf_counter() - started,
    )
    if args.out:
        Path(args.out).write_text(dump_json(report.to_json_dict()))
    sys.stdout.write(report.to_table())
    print(f"elapsed {report.timing_seconds:.2f}s", file=sys.stderr)
    return 0


def _parse_grid(text: str | None):
    if text is None:
        return None
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"--grid must be comma-separated numbers, got {text!r}") from None


def cmd_tune(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    if args.scenario is not None:
        spec = builtin_scenario(args.scenario, n=args.n, sigma=args.sigma, alpha=args.alpha)
        dataset = generate(spec, substream(args.seed, 0))
        master_seed = mix64(args.seed, 1)
    else:
        if args.response is None:
            raise ValueError("--data requires --response")
        dataset = ingest_csv(args.data, args.response)
        master_seed = args.seed
    curve = tune_kappa(
        dataset,
        _parse_grid(args.grid),
        b_tune=args.ensemble_size,
        master_seed=master_seed,
    )
    text = tuning_curve_csv(curve.entries, curve.chosen_kappa)
    if args.out:
        Path(args.out).write_text(text)
        print(f"chosen kappa: {curve.chosen_kappa!r}")
    else:
        sys.stdout.write(text)
    print(f"elapsed {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return 0


def cmd_benchmark(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    spec = builtin_scenario(args.scenario, n=args.n, sigma=args.sigma, alpha=args.alpha)
    screening = None
    if args.sis is not None:
        screening = ScreeningConfig(q=args.sis)
    elif args.scenario == "largep120":
        screening = ScreeningConfig(q=spec.n - 1)
    if screening is not None:
        screening.validate(spec.n, spec.p)
    if args.kappa is not None:
        kappa = args.kappa
    elif args.auto_tune:
        kappa = None
    else:
        kappa = DEFAULT_KAPPA
    progress = None
    if sys.stderr.isatty():

        def progress(done: int, total: int) -> None:
            print(f"replicate {done}/{total}", file=sys.stderr)

    result = run_benchmark(
        spec,
        reps=args.reps,
        ensemble_size=args.ensemble_size,
        kappa=kappa,
        master_seed=args.seed,
        screening=screening,
        progress=progress,
    )
    config = {
        "command": "benchmark",
        "scenario": spec.name,
        "n": spec.n,
        "sigma": spec.sigma,
        "alpha": args.alpha,
        "reps": args.reps,
        "ensemble_size": args.ensemble_size,
        "kappa": result.kappa,
        "auto_tuned": bool(args.auto_tune),
        "lam": DEFAULT_LAM,
        "seed": args.seed,
        "screening_q": screening.q if screening is not None else None,
    }
    names = tuple(f"x{j + 1}" for j in range(spec.p))
    if args.out:
        Path(args.out).write_text(dump_json(benchmark_json_dict(result.summary, names, config)))
    sys.stdout.write(result.summary.to_table())
    print(f"kappa {result.kappa!r}")
    print(f"elapsed {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"st2e: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        print(f"st2e: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
