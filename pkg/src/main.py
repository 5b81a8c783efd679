import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.app.config.loader import load_config
from src.app.config.settings import settings
from src.app.models.sweep import SweepSpec, SweepTask
from src.app.services.csv_writer import columns_for, emit_csv, read_columns
from src.app.services.sweep_service import SweepService
from src.app.utils.errors import BudgetExhaustedError, HierpinError
from src.app.utils.fitting import fit_double_log, fit_power_law
from src.app.utils.logging_config import setup_logging

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2

_SUBCOMMAND_TASKS = {
    "annealed": SweepTask.ANNEALED,
    "variance": SweepTask.VARIANCE,
    "mc": SweepTask.MC,
    "bracket": SweepTask.BRACKET,
    "green": SweepTask.GREEN,
    "lemma22": SweepTask.LEMMA22,
    "checkpoint": SweepTask.CHECKPOINT,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hierpin",
        description="Hierarchical pinning model: recursions, pool Monte Carlo "
        "and critical-point certificates",
    )
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(settings.output.DEFAULT_OUT),
        help="CSV output path (the JSON record is written next to it)",
    )
    parser.add_argument("--threads", type=int, default=0, help="worker threads")
    parser.add_argument(
        "--strict-certificates",
        action="store_true",
        help="replay certified inequalities in extended precision",
    )
    parser.add_argument(
        "--log-level",
        help="console log level (DEBUG when HIERPIN_DEBUG is set, else "
        f"{settings.logging.DEFAULT_LOG_LEVEL})",
    )
    parser.add_argument(
        "--log-file",
        action="store_true",
        help=f"also log to {settings.logging.LOG_DIR}/{settings.logging.LOG_FILE_NAME}",
    )

    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMAND_TASKS:
        sub.add_parser(name, help=f"run the {name} task over the configured grid")
    certify = sub.add_parser("certify", help="certify F = 0 or F > 0 on the grid")
    certify.add_argument("kind", choices=["deloc", "loc"])

    fit = sub.add_parser("fit", help="power-law or double-log fit of two CSV columns")
    fit.add_argument("csv", type=Path)
    fit.add_argument("--x", required=True, help="abscissa column")
    fit.add_argument("--y", required=True, help="ordinate column")
    fit.add_argument(
        "--double-log",
        action="store_true",
        help="regress log(-log y) on log x instead of log y",
    )
    return parser


def task_for(args: argparse.Namespace) -> SweepTask:
    if args.command == "certify":
        return SweepTask(f"certify_{args.kind}")
    return _SUBCOMMAND_TASKS[args.command]


def resolve_spec(args: argparse.Namespace) -> SweepSpec:
    """Config file plus command-line overrides, validated again as a whole."""
    if args.config is None:
        raise HierpinError("--config is required for this subcommand")
    spec = load_config(args.config)
    data = spec.model_dump()
    data["task"] = task_for(args)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.strict_certificates:
        data["certificate_controls"]["strict"] = True
    return SweepSpec.model_validate(data)


def run_fit(args: argparse.Namespace) -> int:
    columns = read_columns(args.csv, [args.x, args.y])
    pairs = [
        (x, y)
        for x, y in zip(columns[args.x], columns[args.y])
        if x is not None and y is not None
    ]
    xs = [x for x, _ in pairs]
    ys = [y for _, y in pairs]
    if args.double_log:
        dl = fit_double_log(xs, ys)
        print(
            f"slope={dl.slope:.6g} +- {dl.slope_stderr:.2g} "
            f"intercept={dl.intercept:.6g} r2={dl.r_squared:.6f} ({len(xs)} points)"
        )
    else:
        pl = fit_power_law(xs, ys)
        print(
            f"exponent={pl.exponent:.6g} +- {pl.exponent_stderr:.2g} "
            f"prefactor={pl.prefactor:.6g} r2={pl.r_squared:.6f} ({len(xs)} points)"
        )
    return EXIT_OK


async def run_task(args: argparse.Namespace) -> int:
    spec = resolve_spec(args)
    service = SweepService(args.threads)
    try:
        record = await service.run_sweep_async(spec, args.out)
    finally:
        service.cleanup()
    emit_csv(record, args.out, columns_for(spec))
    print(
        f"{spec.task.value}: {len(record.points)} points in {record.wall_time:.2f} s "
        f"-> {args.out}"
    )
    if record.budget_exhausted:
        exhausted = sum(p.budget_exhausted for p in record.points)
        raise BudgetExhaustedError(
            f"search budget exhausted for {exhausted} of {len(record.points)} points"
        )
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, log_to_file=args.log_file)
    try:
        if args.command == "fit":
            return run_fit(args)
        return asyncio.run(run_task(args))
    except ValidationError as e:
        print(f"Invalid configuration:\n{e}", file=sys.stderr)
        return EXIT_INVALID
    except HierpinError as e:
        log.error(str(e))
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
