import asyncio
from concurrent.futures import ThreadPoolExecutor
import functools
import logging
import os
from pathlib import Path
import time
from typing import Dict, List, Optional, Sequence, Tuple
import uuid

from pydantic.dataclasses import dataclass
from tabulate import tabulate

from dhtguard.errors import UsageError
from dhtguard.events import Broker, Event, Events, EventType
from dhtguard.metrics import baseline_error, level_errors, min_guard_band
from dhtguard.plot import emit_svg
from dhtguard.results import read_signal_file, write_csv
from dhtguard.signal import Signal
from dhtguard.storage import Storage, StoredSweep
from dhtguard.sweep import DEFAULT_GUARDS, SweepResult, SweepRow, sweep_row, transform_points, validate_guards
from dhtguard.transform import reconstruct_with_guard
from dhtguard.waveforms import WaveformSpec, generate, paper_waveforms


DHTGUARD_WORKERS = os.getenv("DHTGUARD_WORKERS")

PAPER_WIDTH = 90
PAPER_GUARD = 90
# Ratios at m = 90, percent of the zero-guard error, as published.
PAPER_REPORTED = {
    "sine": 1.02,
    "ramp": 0.62,
    "square": 1.6,
    "triangle": 1.08,
}


log = logging.getLogger(__name__)


def run_in_executor(f):
    @functools.wraps(f)
    async def _async_f(*args, **kwargs):
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(None, lambda: f(*args, **kwargs))
    return _async_f


def worker_count() -> Optional[int]:
    """Thread pool size from DHTGUARD_WORKERS; unset or 0 leaves it to the executor."""
    if not DHTGUARD_WORKERS:
        return None
    try:
        workers = int(DHTGUARD_WORKERS)
    except ValueError:
        raise UsageError(f"DHTGUARD_WORKERS must be an integer, got {DHTGUARD_WORKERS!r}")
    if workers < 0:
        raise UsageError(f"DHTGUARD_WORKERS must be non-negative, got {workers}")
    return workers or None


def run(coro):
    """Run a coroutine with a thread pool sized by DHTGUARD_WORKERS as default executor."""
    try:
        workers = worker_count()
    except UsageError:
        coro.close()
        raise

    async def _main():
        asyncio.get_running_loop().set_default_executor(ThreadPoolExecutor(max_workers=workers))
        return await coro
    return asyncio.run(_main())


@dataclass(frozen=True)
class ExperimentConfig:
    output_csv: Path
    waveform: Optional[WaveformSpec] = None
    input_samples: Optional[Path] = None
    guards: Tuple[int, ...] = tuple(DEFAULT_GUARDS)
    theta: Optional[float] = None
    output_svg: Optional[Path] = None

    def __post_init_post_parse__(self):
        if (self.waveform is None) == (self.input_samples is None):
            raise UsageError("Exactly one of a waveform or an input sample file is required")
        if self.theta is not None and not self.theta > 0:
            raise UsageError(f"Threshold must be positive, got {self.theta}")
        try:
            validate_guards(self.guards)
        except ValueError as e:
            raise UsageError(str(e))

    def label(self) -> str:
        if self.waveform is not None:
            return self.waveform.label()
        assert self.input_samples is not None
        return self.input_samples.stem

    def load_signal(self) -> Signal:
        if self.waveform is not None:
            return generate(self.waveform)
        assert self.input_samples is not None
        return read_signal_file(self.input_samples)


@dataclass(frozen=True)
class ExperimentReport:
    result: SweepResult
    theta: Optional[float] = None
    min_guard: Optional[int] = None


async def run_sweep(signal: Signal, guards: Sequence[int], label: str, broker: Broker,
                    sweep_id: Optional[str] = None) -> SweepResult:
    """sweep(), with rows evaluated concurrently and published as they complete.

    Rows come back in input order regardless of completion order.
    """
    validate_guards(guards)
    sweep_id = sweep_id or str(uuid.uuid4())

    baseline = await run_in_executor(baseline_error)(signal)
    broker.publish(sweep_id, Events.sweep_started(sweep_id, label, signal.width, baseline))
    log.info(f"Sweeping {label} (N={signal.width}) over {len(guards)} guard values")

    async def _row(m: int) -> SweepRow:
        row = await run_in_executor(sweep_row)(signal, m, baseline)
        broker.publish(sweep_id, Events.row_computed(sweep_id, row))
        return row

    rows = await asyncio.gather(*[_row(m) for m in guards])
    result = SweepResult(label, signal.width, baseline, tuple(rows))
    broker.publish(sweep_id, Events.sweep_finished(sweep_id, result))
    return result


async def run_experiment(config: ExperimentConfig, broker: Broker) -> ExperimentReport:
    signal = config.load_signal()
    result = await run_sweep(signal, list(config.guards), config.label(), broker)

    write_csv(result, config.output_csv)
    log.info(f"Wrote {len(result.rows)} rows to {config.output_csv}")
    if config.output_svg is not None:
        emit_svg(result, config.output_svg)

    min_guard = None
    if config.theta is not None:
        m_max = max(config.guards)
        min_guard = await run_in_executor(min_guard_band)(signal, config.theta, m_max)
        if min_guard is None:
            log.info(f"No guard band up to {m_max} brings the error below {config.theta}")
        else:
            log.info(f"Smallest guard band with error below {config.theta}: {min_guard}")

    return ExperimentReport(result, config.theta, min_guard)


def paper_configs(outdir: Path, width: int = PAPER_WIDTH, guards=DEFAULT_GUARDS) -> List[ExperimentConfig]:
    return [
        ExperimentConfig(
            output_csv=outdir / f"{spec.label()}.csv",
            output_svg=outdir / f"{spec.label()}.svg",
            waveform=spec,
            guards=tuple(guards),
        )
        for spec in paper_waveforms(width)
    ]


async def run_paper_suite(outdir: Path, broker: Broker, width: int = PAPER_WIDTH, guards=DEFAULT_GUARDS) -> List[SweepResult]:
    outdir.mkdir(parents=True, exist_ok=True)
    results = []
    for config in paper_configs(outdir, width, guards):
        report = await run_experiment(config, broker)
        results.append(report.result)
    return results


def paper_summary(results: List[SweepResult], guard: int = PAPER_GUARD) -> str:
    table = []
    for result in results:
        row = result.row(guard)
        computed = "-" if row is None else format(row.ratio_percent, ".3f")
        reported = PAPER_REPORTED.get(result.label)
        table.append([
            result.label,
            result.width,
            computed,
            "-" if reported is None else reported,
            transform_points(result.width, guard),
        ])
    return tabulate(
        table,
        headers=["waveform", "N", f"% at m={guard}", "published %", "transform points"],
        tablefmt="simple",
    )


def attach_storage(broker: Broker, storage: Storage) -> str:
    """Persist every finished sweep published on the broker."""
    async def store_event(event: Event):
        if event.typ == EventType.SWEEP_FINISHED:
            result = event.result
            sweep = StoredSweep(
                sweep_id=event.sweep_id,
                timestamp=int(time.time() * 1000),
                label=result.label,
                width=result.width,
                baseline_rms=result.baseline_rms,
            )
            await storage.store_sweep(sweep, result.rows)
            log.info(f"Stored sweep {event.sweep_id} ({result.label})")

    return broker.subscribe("*", [EventType.SWEEP_FINISHED], store_event)


def attach_progress_log(broker: Broker) -> str:
    progress: Dict[str, int] = {}

    async def log_event(event: Event):
        if event.typ == EventType.SWEEP_STARTED:
            log.debug(f"[{event.sweep_id}] baseline rms {event.baseline_rms:.6g}")
        elif event.typ == EventType.ROW_COMPUTED:
            progress[event.sweep_id] = progress.get(event.sweep_id, 0) + 1
            row = event.row
            log.debug(f"[{event.sweep_id}] #{progress[event.sweep_id]} m={row.guard} "
                      f"rms={row.rms_abs:.6g} ({row.ratio_percent:.4g}%)")

    return broker.subscribe("*", [EventType.SWEEP_STARTED, EventType.ROW_COMPUTED], log_event)


@dataclass(frozen=True)
class TransformReport:
    result: SweepResult
    transform_points: int
    level_step: Optional[float] = None
    level_errors: Optional[int] = None


async def run_transform(input_samples: Path, guard: int, output_csv: Path, broker: Broker,
                        level_step: Optional[float] = None) -> TransformReport:
    """Round trip a user signal through a guard of `guard` points, against no guard."""
    if guard < 0:
        raise UsageError(f"Guard band must be non-negative, got {guard}")
    signal = read_signal_file(input_samples)
    guards = [0] if guard == 0 else [0, guard]
    result = await run_sweep(signal, guards, input_samples.stem, broker)
    write_csv(result, output_csv)

    errors = None
    if level_step is not None:
        if not level_step > 0:
            raise UsageError(f"Quantization step must be positive, got {level_step}")
        reconstruction = await run_in_executor(reconstruct_with_guard)(signal, guard)
        errors = level_errors(signal, reconstruction, level_step)
        log.info(f"{errors} of {signal.width} samples off their quantization level at m={guard}")

    return TransformReport(result, transform_points(signal.width, guard), level_step, errors)
