import math
from typing import Sequence, Tuple, Union

import numpy as np
from pydantic.dataclasses import dataclass

from dhtguard.errors import InputValidationError


def _check_finite(values: Sequence[float], what: str):
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise InputValidationError(f"{what} value at position {i} is not finite: {v}")


@dataclass(frozen=True)
class Signal:
    """A finite real sequence; zero outside [origin, origin + width - 1]."""

    origin: int
    samples: Tuple[float, ...]

    def __post_init_post_parse__(self):
        if len(self.samples) < 1:
            raise InputValidationError("Signal needs at least one sample")
        _check_finite(self.samples, "Signal")

    @property
    def width(self) -> int:
        return len(self.samples)

    @property
    def stop(self) -> int:
        """Last absolute index of the support, inclusive."""
        return self.origin + self.width - 1

    def at(self, n: int) -> float:
        if self.origin <= n <= self.stop:
            return self.samples[n - self.origin]
        return 0.0

    def array(self) -> np.ndarray:
        return np.asarray(self.samples, dtype=np.float64)

    def indices(self) -> np.ndarray:
        return np.arange(self.origin, self.origin + self.width, dtype=np.int64)

    @staticmethod
    def from_array(origin: int, values) -> "Signal":
        return Signal(origin, tuple(float(v) for v in np.asarray(values, dtype=np.float64)))


@dataclass(frozen=True)
class Spectrum:
    """Transform-domain values g(k) for k in [start, start + len(values) - 1]."""

    start: int
    values: Tuple[float, ...]

    def __post_init_post_parse__(self):
        if len(self.values) < 1:
            raise InputValidationError("Spectrum needs at least one value")
        _check_finite(self.values, "Spectrum")

    @property
    def stop(self) -> int:
        return self.start + len(self.values) - 1

    def at(self, k: int) -> float:
        if self.start <= k <= self.stop:
            return self.values[k - self.start]
        return 0.0

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.stop + 1, dtype=np.int64)


@dataclass(frozen=True)
class GuardedSpectrum:
    """Transform of a signal over its support widened by `guard` points per side."""

    signal_origin: int
    signal_width: int
    guard: int
    values: Tuple[float, ...]

    def __post_init_post_parse__(self):
        if self.signal_width < 1:
            raise InputValidationError(f"Signal width must be positive, got {self.signal_width}")
        if self.guard < 0:
            raise InputValidationError(f"Guard must be non-negative, got {self.guard}")
        expected = self.signal_width + 2 * self.guard
        if len(self.values) != expected:
            raise InputValidationError(
                f"Guarded spectrum needs {expected} values (N + 2m), got {len(self.values)}")
        _check_finite(self.values, "Spectrum")

    @property
    def start(self) -> int:
        return self.signal_origin - self.guard

    @property
    def stop(self) -> int:
        return self.signal_origin + self.signal_width + self.guard - 1

    @property
    def size(self) -> int:
        return len(self.values)

    def at(self, k: int) -> float:
        if self.start <= k <= self.stop:
            return self.values[k - self.start]
        return 0.0

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.stop + 1, dtype=np.int64)


SpectrumLike = Union[Spectrum, GuardedSpectrum]
