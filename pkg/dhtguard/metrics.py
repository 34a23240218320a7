import logging
from typing import Optional

import numpy as np
from pydantic.dataclasses import dataclass

from dhtguard.errors import DegenerateBaselineError, InputValidationError, ShapeError
from dhtguard.signal import Signal
from dhtguard.transform import reconstruct_with_guard


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ErrorReport:
    guard: int
    rms_abs: float
    rms_ratio_to_zero_guard: float


def _check_shape(reference: Signal, candidate: Signal):
    if reference.origin != candidate.origin or reference.width != candidate.width:
        raise ShapeError(
            f"Signals differ in shape: origin {reference.origin}/{candidate.origin}, "
            f"width {reference.width}/{candidate.width}")


def rms_error(reference: Signal, candidate: Signal) -> float:
    """Root-mean-square pointwise difference, divided by the signal width."""
    _check_shape(reference, candidate)
    diff = reference.array() - candidate.array()
    return float(np.sqrt(np.sum(diff * diff) / reference.width))


def guard_error(signal: Signal, m: int) -> float:
    return rms_error(signal, reconstruct_with_guard(signal, m))


def baseline_error(signal: Signal) -> float:
    """Reconstruction error without guard band; raises if it is exactly zero."""
    baseline = guard_error(signal, 0)
    if baseline == 0.0:
        raise DegenerateBaselineError(rms_abs=0.0)
    return baseline


def error_ratio(signal: Signal, m: int) -> ErrorReport:
    if m < 0:
        raise InputValidationError(f"Guard band must be non-negative, got {m}")
    baseline = guard_error(signal, 0)
    rms_abs = baseline if m == 0 else guard_error(signal, m)
    if baseline == 0.0:
        raise DegenerateBaselineError(rms_abs=rms_abs)
    return ErrorReport(m, rms_abs, rms_abs / baseline)


def min_guard_band(signal: Signal, theta: float, m_max: int) -> Optional[int]:
    """Smallest m in [0, m_max] whose reconstruction error is below theta.

    Scans upward from 0: the error is not known to be monotone in m, so a
    bisection could skip the first qualifying value.
    """
    if not theta > 0:
        raise InputValidationError(f"Threshold must be positive, got {theta}")
    if m_max < 0:
        raise InputValidationError(f"Search limit must be non-negative, got {m_max}")

    for m in range(m_max + 1):
        error = guard_error(signal, m)
        log.debug(f"m={m} rms={error:.6g}")
        if error < theta:
            return m
    return None


def quantize(signal: Signal, step: float) -> Signal:
    """Round every sample to the nearest multiple of step."""
    return Signal.from_array(signal.origin, _levels(signal, step) * step)


def _levels(signal: Signal, step: float) -> np.ndarray:
    if not step > 0:
        raise InputValidationError(f"Quantization step must be positive, got {step}")
    return np.rint(signal.array() / step)


def level_errors(reference: Signal, candidate: Signal, step: float) -> int:
    """Number of samples that land on a different quantization level."""
    _check_shape(reference, candidate)
    return int(np.count_nonzero(_levels(reference, step) != _levels(candidate, step)))


def min_guard_band_levels(signal: Signal, step: float, m_max: int) -> Optional[int]:
    """Smallest m whose reconstruction quantizes back onto the original levels."""
    if m_max < 0:
        raise InputValidationError(f"Search limit must be non-negative, got {m_max}")

    for m in range(m_max + 1):
        if level_errors(signal, reconstruct_with_guard(signal, m), step) == 0:
            return m
    return None
