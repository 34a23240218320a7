import csv
import math
from pathlib import Path
from typing import List, Union

from dhtguard.errors import InputValidationError
from dhtguard.signal import Signal
from dhtguard.sweep import SweepResult, SweepRow


CSV_HEADER = ["m", "rms_abs", "ratio_percent"]
SIGNIFICANT_DIGITS = 12

PathLike = Union[str, Path]


def format_value(value: float) -> str:
    # repr-free, locale-free formatting
    return format(value, f".{SIGNIFICANT_DIGITS}g")


def rounded(value: float) -> float:
    """The value as it reads back from a CSV."""
    return float(format_value(value))


def write_csv(result: SweepResult, path: PathLike):
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in result.rows:
            writer.writerow([str(row.guard), format_value(row.rms_abs), format_value(row.ratio_percent)])


def read_csv(path: PathLike) -> List[SweepRow]:
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise InputValidationError(f"Unexpected CSV header in {path}: {header}")
        return [SweepRow(int(m), float(rms_abs), float(ratio)) for m, rms_abs, ratio in reader]


def read_signal_file(path: PathLike) -> Signal:
    """One amplitude per line, '#' comment lines and blank lines ignored, origin 0."""
    samples = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                value = float(text)
            except ValueError:
                raise InputValidationError(f"{path}:{lineno}: not a number: {text!r}")
            if not math.isfinite(value):
                raise InputValidationError(f"{path}:{lineno}: value is not finite: {text!r}")
            samples.append(value)

    if not samples:
        raise InputValidationError(f"{path}: no samples found")
    return Signal(0, tuple(samples))
