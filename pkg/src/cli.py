"""
src/cli.py - Command-line entry point for benchmarks and theory checks.

Usage:
    python -m src.cli bench synthetic --n 10000 --alpha 1 --m 100000
    python -m src.cli bench trace --trace queries.csv --oracle file:pred.csv
    python -m src.cli bench error-sweep --deltas 1,2,4,8
    python -m src.cli bench alpha-sweep --alphas 1,1.25,1.5
    python -m src.cli bench history --db sqlite:///results/history.db
    python -m src.cli bench history --db ... --show 3 (or --delete 3)
    python -m src.cli verify theory --kind all

Environment variables used (see src/config.py):
- BENCH_SEED, BENCH_TRIALS, THEORY_TRIALS, BENCH_WORKERS, BENCH_STRUCTURES
- RESULTS_PATH, RESULTS_DATABASE_URL, HASH_PRIME, LOG_LEVEL
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import pandas as pd
from dotenv import find_dotenv, load_dotenv

# .env values must be visible before src.config reads the environment.
load_dotenv(find_dotenv())

from src import config as settings  # noqa: E402
from src.analytics import AnalyticsError  # noqa: E402
from src.bench import (  # noqa: E402
    SHUFFLED_TREAP,
    STRUCTURES,
    THEORY_KINDS,
    ConfigError,
    ExperimentConfig,
    run_alpha_sweep,
    run_error_sweep,
    run_synthetic,
    run_theory_checks,
    run_trace,
)
from src.logging_config import setup_logging  # noqa: E402
from src.oracle import OracleError, parse_oracle  # noqa: E402
from src.workload import Mode, WorkloadError  # noqa: E402

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_THEORY_FAILED = 1
EXIT_BAD_INPUT = 2


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}"
        ) from None


def _structure_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=settings.BENCH_SEED)
    parser.add_argument("--workers", type=int, default=settings.BENCH_WORKERS)
    parser.add_argument(
        "--out", type=Path, default=None, help="Result CSV path."
    )
    parser.add_argument(
        "--db",
        default=settings.RESULTS_DATABASE_URL,
        help="Run-history database URL (default: RESULTS_DATABASE_URL).",
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)


def _add_experiment(parser: argparse.ArgumentParser, sweep: str = "") -> None:
    _add_common(parser)
    parser.add_argument(
        "--structures",
        type=_structure_list,
        default=list(settings.BENCH_STRUCTURES),
        help=f"Comma list from {', '.join(STRUCTURES)}.",
    )
    parser.add_argument(
        "--shuffled",
        action="store_true",
        help="Also run the shuffled (hash-remapped) learned treap.",
    )
    parser.add_argument(
        "--oracle",
        type=parse_oracle,
        default="perfect",
        help="perfect | random | noisy:EPS,DELTA | mult:DELTA | topk:K"
        " | topkfreq:K | file:PATH",
    )
    parser.add_argument("--trials", type=int, default=settings.BENCH_TRIALS)
    parser.add_argument("--m", type=int, default=100_000)
    parser.add_argument(
        "--top-fraction",
        type=float,
        default=None,
        help="Keep only queries to the most frequent fraction of keys.",
    )
    if sweep != "alpha":
        parser.add_argument("--alpha", type=float, default=1.0)
    parser.add_argument(
        "--n",
        type=_int_list,
        default=[10_000],
        help="Key count, or a comma list to sweep several.",
    )
    parser.add_argument(
        "--mode",
        choices=[mode.value for mode in Mode],
        default=Mode.EXACT.value,
    )
    parser.add_argument(
        "--identity-ranks",
        action="store_true",
        help="Do not permute ranks onto keys (rank order = key order).",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="learned-treap",
        description="Benchmark learned treaps against baseline trees.",
    )
    groups = parser.add_subparsers(dest="group", required=True)

    bench = groups.add_parser("bench", help="Run benchmark experiments.")
    commands = bench.add_subparsers(dest="command", required=True)

    synthetic = commands.add_parser(
        "synthetic", help="Zipf workloads over n keys."
    )
    _add_experiment(synthetic)
    synthetic.set_defaults(handler=cmd_synthetic)

    trace = commands.add_parser("trace", help="Replay a trace CSV.")
    _add_experiment(trace)
    trace.add_argument("--trace", type=Path, required=True)
    trace.set_defaults(handler=cmd_trace)

    error_sweep = commands.add_parser(
        "error-sweep", help="Multiplicative-error oracle sweep."
    )
    _add_experiment(error_sweep)
    error_sweep.add_argument(
        "--deltas", type=_float_list, default=[1.0, 2.0, 4.0, 8.0]
    )
    error_sweep.set_defaults(handler=cmd_error_sweep)

    alpha_sweep = commands.add_parser(
        "alpha-sweep", help="Fixed n, varying Zipf parameter."
    )
    _add_experiment(alpha_sweep, sweep="alpha")
    alpha_sweep.add_argument(
        "--alphas", type=_float_list, default=[1.0, 1.25, 1.5, 2.0]
    )
    alpha_sweep.set_defaults(handler=cmd_alpha_sweep)

    history = commands.add_parser(
        "history", help="List, show or delete recorded runs."
    )
    history.add_argument("--db", default=settings.RESULTS_DATABASE_URL)
    history.add_argument("--limit", type=int, default=20)
    action = history.add_mutually_exclusive_group()
    action.add_argument(
        "--show", type=int, metavar="RUN_ID", help="Print one run's rows."
    )
    action.add_argument(
        "--delete", type=int, metavar="RUN_ID", help="Delete one run."
    )
    history.add_argument("--log-level", default=settings.LOG_LEVEL)
    history.set_defaults(handler=cmd_history)

    verify = groups.add_parser("verify", help="Monte Carlo theory checks.")
    checks = verify.add_subparsers(dest="command", required=True)
    theory = checks.add_parser("theory", help="Compare against analytics.")
    _add_common(theory)
    theory.add_argument(
        "--kind",
        default="all",
        help=f"all, or a comma list from {', '.join(THEORY_KINDS)}.",
    )
    theory.add_argument("--n", type=int, default=None)
    theory.add_argument("--alpha", type=float, default=None)
    theory.add_argument("--m", type=int, default=None)
    theory.add_argument("--trials", type=int, default=None)
    theory.set_defaults(handler=cmd_theory)
    return parser


# --- Helpers ---


def _experiment_config(args: argparse.Namespace, **overrides):
    structures = list(args.structures)
    if args.shuffled and SHUFFLED_TREAP not in structures:
        structures.append(SHUFFLED_TREAP)
    fields = dict(
        structures=tuple(structures),
        n=tuple(args.n),
        alpha=getattr(args, "alpha", 1.0),
        m=args.m,
        mode=Mode(args.mode),
        oracle=args.oracle,
        trials=args.trials,
        seed=args.seed,
        out=args.out,
        top_fraction=args.top_fraction,
        identity_ranks=args.identity_ranks,
        hash_prime=settings.HASH_PRIME,
        workers=args.workers,
    )
    fields.update(overrides)
    return ExperimentConfig(**fields)


def _default_out(args: argparse.Namespace, name: str) -> Path:
    return args.out or settings.RESULTS_PATH / f"{name}.csv"


def _record_history(
    db_url: Optional[str], command: str, config: dict, rows: Iterable[dict]
) -> None:
    if not db_url:
        return
    # Imported lazily: runs without a history database never touch SQL.
    from src.crud import record_experiment
    from src.db import get_engine, get_session, init_db

    engine = get_engine(db_url)
    try:
        init_db(engine)
        with get_session(engine) as session:
            run = record_experiment(session, command, config, rows)
        logger.info("Run history saved as run %s", run.id)
    finally:
        engine.dispose()


def _trial_rows(results) -> List[dict]:
    rows = []
    for result in results:
        rows.extend(result.trials.to_dict("records"))
    return rows


# --- Command handlers ---


def cmd_synthetic(args: argparse.Namespace) -> int:
    config = _experiment_config(args, out=_default_out(args, "synthetic"))
    result = run_synthetic(config)
    _record_history(
        args.db, "bench synthetic", config.describe(), _trial_rows([result])
    )
    return EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    config = _experiment_config(
        args, trace_path=args.trace, out=_default_out(args, "trace")
    )
    result = run_trace(config)
    _record_history(
        args.db, "bench trace", config.describe(), _trial_rows([result])
    )
    return EXIT_OK


def cmd_error_sweep(args: argparse.Namespace) -> int:
    config = _experiment_config(args, out=_default_out(args, "error_sweep"))
    sweep = run_error_sweep(config, args.deltas)
    for name in sweep.results[min(sweep.results)].structures:
        print(
            f"{name}: cost by delta {sweep.mean_costs(name)}, "
            f"non-decreasing={sweep.is_monotone(name)}"
        )
    described = dict(config.describe(), deltas=list(args.deltas))
    _record_history(
        args.db,
        "bench error-sweep",
        described,
        _trial_rows(sweep.results.values()),
    )
    return EXIT_OK


def cmd_alpha_sweep(args: argparse.Namespace) -> int:
    config = _experiment_config(
        args, alpha=1.0, out=_default_out(args, "alpha_sweep")
    )
    sweep = run_alpha_sweep(config, args.alphas)
    described = dict(config.describe(), alphas=list(args.alphas))
    _record_history(
        args.db,
        "bench alpha-sweep",
        described,
        _trial_rows(sweep.results.values()),
    )
    return EXIT_OK


def _print_runs(session, limit: int) -> None:
    from src.crud import list_runs

    runs = list_runs(session, limit=limit)
    if not runs:
        print("No recorded runs.")
    for run in runs:
        print(
            f"{run.id}\t{run.created_at:%Y-%m-%d %H:%M:%S}\t"
            f"{run.command}\toracle={run.oracle}\tseed={run.seed}"
            f"\ttrials={run.trials}\trows={len(run.trial_records)}"
        )


def _print_run(session, run_id: int) -> None:
    from src.crud import get_run, get_trials_for_run

    run = get_run(session, run_id)
    if run is None:
        raise ConfigError(f"no recorded run with id {run_id}")
    print(f"{run.id}\t{run.command}\t{run.config_json}")
    for record in get_trials_for_run(session, run_id):
        print(
            f"{record.structure}\ttrial={record.trial}\tn={record.n}"
            f"\tcomparisons={record.comparisons}\tops={record.ops}"
        )


def _delete_run(session, run_id: int) -> None:
    from src.crud import delete_run

    if not delete_run(session, run_id):
        raise ConfigError(f"no recorded run with id {run_id}")
    print(f"Deleted run {run_id}.")


def cmd_history(args: argparse.Namespace) -> int:
    if not args.db:
        raise ConfigError(
            "history needs --db or RESULTS_DATABASE_URL to be set"
        )
    from src.db import get_engine, get_session, init_db

    engine = get_engine(args.db)
    try:
        init_db(engine)
        with get_session(engine) as session:
            if args.show is not None:
                _print_run(session, args.show)
            elif args.delete is not None:
                _delete_run(session, args.delete)
            else:
                _print_runs(session, args.limit)
    finally:
        engine.dispose()
    return EXIT_OK


def _theory_kinds(text: str) -> List[str]:
    if text == "all":
        return list(THEORY_KINDS)
    kinds = [part.strip() for part in text.split(",") if part.strip()]
    unknown = [kind for kind in kinds if kind not in THEORY_KINDS]
    if not kinds or unknown:
        raise ConfigError(
            f"unknown theory kind(s) {unknown or text!r}; choose from "
            f"all, {', '.join(THEORY_KINDS)}"
        )
    return kinds


def cmd_theory(args: argparse.Namespace) -> int:
    kinds = _theory_kinds(args.kind)
    params = {
        "n": args.n,
        "alpha": args.alpha,
        "m": args.m,
        "trials": args.trials,
        "seed": args.seed,
        "workers": args.workers,
    }
    reports = run_theory_checks(kinds, params)
    for report in reports:
        print(report.summary())

    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.concat(
            [report.to_frame() for report in reports], ignore_index=True
        )
        frame.to_csv(args.out, index=False, float_format="%.12g")
        logger.info("Wrote theory report to %s", args.out)

    outcome = {report.kind: report.passed for report in reports}
    _record_history(
        args.db,
        "verify theory",
        {"kinds": kinds, "seed": args.seed, "passed": outcome},
        [],
    )
    failed = [report.kind for report in reports if not report.passed]
    if failed:
        logger.error("Theory checks failed: %s", ", ".join(failed))
        return EXIT_THEORY_FAILED
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    logger.info("Running %s %s", args.group, args.command)
    try:
        return args.handler(args)
    except (AnalyticsError, ConfigError, OracleError, WorkloadError) as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except Exception:
        logger.exception(
            "Unexpected failure in %s %s", args.group, args.command
        )
        raise


if __name__ == "__main__":
    sys.exit(main())
