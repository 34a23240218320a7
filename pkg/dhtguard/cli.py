import argparse
import logging
import os
from pathlib import Path
import sys
from typing import List, Optional

from sqlalchemy.exc import OperationalError
from sqlalchemy.ext.asyncio import create_async_engine
from tabulate import tabulate

from dhtguard.errors import DegenerateBaselineError, SweepNotFoundError, UsageError
from dhtguard.events import Broker
from dhtguard.experiment import (
    ExperimentConfig, attach_progress_log, attach_storage, paper_summary, run,
    run_experiment, run_paper_suite, run_transform,
)
from dhtguard.sql import SqlStorage
from dhtguard.sweep import guard_grid
from dhtguard.waveforms import WaveformKind, WaveformSpec


DHTGUARD_LOG_LEVEL = os.getenv("DHTGUARD_LOG_LEVEL")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DEGENERATE = 3

SIGNAL_FILE_HELP = """\
signal files: UTF-8 text, one finite decimal amplitude per line, origin 0.
Lines starting with '#' and blank lines are ignored.

exit codes: 0 success, 1 usage or config error, 2 I/O or database error,
3 degenerate baseline (the signal reconstructs exactly without guard band).
"""


log = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad arguments; that code is taken by I/O errors."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_guards(text: str, extra: List[int]) -> List[int]:
    """'START:STOP:STEP' (inclusive) or a comma list, merged with extra values."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) != 3:
                raise UsageError(f"Guard range must be START:STOP:STEP, got {text!r}")
            return guard_grid(*parts, extra=extra)
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as e:
        raise UsageError(f"Bad guard list {text!r}: {e}")
    if not values and not extra:
        raise UsageError("Guard list is empty")
    return sorted(set(values) | set(extra))


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="dht-guardband",
        description="Guard-band experiments for the non-periodic discrete Hilbert transform.",
        epilog=SIGNAL_FILE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="log every sweep row")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    sweep = sub.add_parser("sweep", help="RMS error against guard band for one signal",
                           epilog=SIGNAL_FILE_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    source = sweep.add_mutually_exclusive_group(required=True)
    source.add_argument("--waveform", choices=[k.value for k in WaveformKind])
    source.add_argument("--input", type=Path, help="signal file, overrides --waveform")
    sweep.add_argument("--width", type=int, default=90)
    sweep.add_argument("--amplitude", type=float, default=1.0)
    sweep.add_argument("--periods", type=int, default=1, help="sine, square and bipolar triangle")
    sweep.add_argument("--bipolar", action="store_true", help="ramp and triangle over [-A, A]")
    sweep.add_argument("--guards", default="0:900:10", help="START:STOP:STEP or comma list")
    sweep.add_argument("--extra", type=int, nargs="*", default=[90], help="guard values added to the grid")
    sweep.add_argument("--csv", type=Path, required=True)
    sweep.add_argument("--svg", type=Path)
    sweep.add_argument("--theta", type=float, help="report the smallest guard band with error below this")
    sweep.add_argument("--db", type=Path, help="also store the sweep in this SQLite file")

    suite = sub.add_parser("paper-suite", help="sine, ramp, square and triangle sweeps")
    suite.add_argument("--outdir", type=Path, required=True)
    suite.add_argument("--width", type=int, default=90)
    suite.add_argument("--guards", default="0:900:10")
    suite.add_argument("--extra", type=int, nargs="*", default=[90])
    suite.add_argument("--db", type=Path)

    transform = sub.add_parser("transform", help="forward and inverse round trip of a signal file",
                               epilog=SIGNAL_FILE_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    transform.add_argument("--input", type=Path, required=True)
    transform.add_argument("--guard", type=int, required=True)
    transform.add_argument("--csv", type=Path, required=True)
    transform.add_argument("--levels", type=float, help="quantization step of the data, reports level errors")
    transform.add_argument("--db", type=Path)

    history = sub.add_parser("history", help="list sweeps stored with --db")
    history.add_argument("--db", type=Path, required=True)
    selected = history.add_mutually_exclusive_group()
    selected.add_argument("--id", help="show the rows of this sweep")
    selected.add_argument("--delete", metavar="ID", help="delete this sweep and its rows")

    return parser


def _open_db(db: Path):
    return create_async_engine(f"sqlite+aiosqlite:///{db}", echo=False, future=True)


async def _run_with_broker(db: Optional[Path], body):
    broker = Broker()
    handles = [attach_progress_log(broker)]
    engine = None
    try:
        if db is not None:
            engine = _open_db(db)
            storage = SqlStorage(engine)
            await storage.initialize()
            handles.append(attach_storage(broker, storage))
        result = await body(broker)
        await broker.drain()
        return result
    finally:
        for handle in handles:
            broker.unsubscribe(handle)
        if engine is not None:
            await engine.dispose()



def cmd_sweep(args) -> int:
    guards = parse_guards(args.guards, args.extra)
    waveform = None
    if args.waveform is not None:
        waveform = WaveformSpec(WaveformKind(args.waveform), args.width, args.amplitude, args.periods, args.bipolar)
    config = ExperimentConfig(
        output_csv=args.csv,
        waveform=waveform,
        input_samples=args.input,
        guards=tuple(guards),
        theta=args.theta,
        output_svg=args.svg,
    )

    report = run(_run_with_broker(args.db, lambda broker: run_experiment(config, broker)))
    result = report.result
    print(f"{result.label}: N={result.width}, baseline rms {result.baseline_rms:.6g}, {len(result.rows)} guard values")
    for m in args.extra:
        row = result.row(m)
        if row is not None:
            print(f"  m={m}: rms {row.rms_abs:.6g} = {row.ratio_percent:.4g}% of baseline")
    if report.theta is not None:
        found = "none within the sweep range" if report.min_guard is None else str(report.min_guard)
        print(f"smallest guard band with rms < {report.theta:g}: {found}")
    return EXIT_OK


def cmd_paper_suite(args) -> int:
    guards = parse_guards(args.guards, args.extra)
    results = run(_run_with_broker(
        args.db, lambda broker: run_paper_suite(args.outdir, broker, args.width, guards)))
    print(paper_summary(results))
    return EXIT_OK


def cmd_transform(args) -> int:
    report = run(_run_with_broker(
        args.db, lambda broker: run_transform(args.input, args.guard, args.csv, broker, args.levels)))
    row = report.result.rows[-1]
    print(f"{report.result.label}: N={report.result.width}, m={row.guard}, "
          f"{report.transform_points} transform points")
    print(f"  rms {row.rms_abs:.6g} = {row.ratio_percent:.4g}% of the error without guard band")
    if report.level_errors is not None:
        print(f"  {report.level_errors} samples off their quantization level (step {report.level_step:g})")
    return EXIT_OK


def cmd_history(args) -> int:
    async def _history(storage: SqlStorage):
        if args.delete is not None:
            sweep = await storage.get_sweep(args.delete)
            await storage.delete_sweep(sweep.sweep_id)
            log.info(f"Deleted sweep {sweep.sweep_id} ({sweep.label})")
            return [sweep], None
        if args.id is not None:
            return [await storage.get_sweep(args.id)], await storage.rows_in_sweep(args.id)
        return await storage.list_sweeps(), None

    async def _run():
        engine = _open_db(args.db)
        try:
            storage = SqlStorage(engine)
            await storage.initialize()
            return await _history(storage)
        finally:
            await engine.dispose()

    sweeps, rows = run(_run())
    print(tabulate(
        [[s.sweep_id, s.timestamp, s.label, s.width, format(s.baseline_rms, ".6g")] for s in sweeps],
        headers=["sweep", "timestamp (ms)", "label", "N", "baseline rms"],
    ))
    if rows is not None:
        print()
        print(tabulate(
            [[row.guard, format(row.rms_abs, ".6g"), format(row.ratio_percent, ".4g")] for row in rows],
            headers=["m", "rms", "% of m=0"],
        ))
    return EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep,
    "paper-suite": cmd_paper_suite,
    "transform": cmd_transform,
    "history": cmd_history,
}


def configure_logging(verbose: bool):
    level = DHTGUARD_LOG_LEVEL or ("DEBUG" if verbose else "INFO")
    logging.basicConfig(stream=sys.stderr, level=level.upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("aiosqlite").setLevel(logging.WARNING)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose)
        return COMMANDS[args.command](args)
    except DegenerateBaselineError as e:
        log.error(str(e))
        return EXIT_DEGENERATE
    except (UsageError, SweepNotFoundError, ValueError) as e:
        log.error(str(e))
        return EXIT_USAGE
    except OSError as e:
        log.error(f"I/O error: {e}")
        return EXIT_IO
    except OperationalError as e:
        log.error(f"Database error: {e.orig}")
        return EXIT_IO
