import logging
from typing import Iterable, List, Optional, Sequence, Tuple

from pydantic.dataclasses import dataclass

from dhtguard.errors import InputValidationError
from dhtguard.metrics import baseline_error, guard_error
from dhtguard.signal import Signal


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRow:
    guard: int
    rms_abs: float
    ratio_percent: float


@dataclass(frozen=True)
class SweepResult:
    label: str
    width: int
    baseline_rms: float
    rows: Tuple[SweepRow, ...]

    def __post_init_post_parse__(self):
        guards = [row.guard for row in self.rows]
        if guards != sorted(set(guards)):
            raise InputValidationError("Sweep rows must be in strictly ascending guard order")

    def row(self, guard: int) -> Optional[SweepRow]:
        for row in self.rows:
            if row.guard == guard:
                return row
        return None

    def guards(self) -> List[int]:
        return [row.guard for row in self.rows]


def validate_guards(guards: Sequence[int]):
    if len(guards) == 0:
        raise InputValidationError("Guard list is empty")
    if guards[0] != 0:
        raise InputValidationError(f"Guard list must start at 0 for the ratio baseline, got {guards[0]}")
    for prev, cur in zip(guards, guards[1:]):
        if cur <= prev:
            raise InputValidationError(f"Guard list must be strictly ascending: {prev} then {cur}")


def sweep_row(signal: Signal, m: int, baseline: float) -> SweepRow:
    rms_abs = baseline if m == 0 else guard_error(signal, m)
    return SweepRow(m, rms_abs, 100.0 * rms_abs / baseline)


def sweep(signal: Signal, guard_values: Sequence[int], label: str = "signal") -> SweepResult:
    """Reconstruction error at every guard width, relative to the zero-guard error."""
    validate_guards(guard_values)
    baseline = baseline_error(signal)
    log.info(f"Sweeping {label} (N={signal.width}) over {len(guard_values)} guard values")

    rows = tuple(sweep_row(signal, m, baseline) for m in guard_values)
    return SweepResult(label, signal.width, baseline, rows)


def guard_grid(start: int, stop: int, step: int, extra: Iterable[int] = ()) -> List[int]:
    """Inclusive START:STOP:STEP grid merged with extra values, sorted and unique."""
    if step <= 0:
        raise InputValidationError(f"Guard step must be positive, got {step}")
    if start < 0 or stop < start:
        raise InputValidationError(f"Invalid guard range {start}:{stop}")
    values = set(range(start, stop + 1, step))
    for m in extra:
        if m < 0:
            raise InputValidationError(f"Guard values must be non-negative, got {m}")
        values.add(m)
    return sorted(values)


DEFAULT_GUARDS = guard_grid(0, 900, 10, extra=[90])


def transform_points(width: int, m: int) -> int:
    """Size of the transform domain for a guard of m points on both sides."""
    return width + 2 * m
