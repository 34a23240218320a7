from enum import Enum
import math

import numpy as np
from pydantic.dataclasses import dataclass

from dhtguard.errors import InputValidationError
from dhtguard.signal import Signal


class WaveformKind(str, Enum):
    SINE = "sine"
    RAMP = "ramp"
    SQUARE = "square"
    TRIANGLE = "triangle"


@dataclass(frozen=True)
class WaveformSpec:
    kind: WaveformKind
    width: int
    amplitude: float = 1.0
    periods: int = 1  # sine, square and bipolar triangle
    # Ramp and triangle swing over [-A, A] instead of [0, A]. Sine and square
    # are bipolar already and ignore it.
    bipolar: bool = False

    def __post_init_post_parse__(self):
        if self.width < 2:
            raise InputValidationError(f"Waveform width must be at least 2, got {self.width}")
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise InputValidationError(f"Amplitude must be positive, got {self.amplitude}")
        if self.periods < 1:
            raise InputValidationError(f"Periods must be at least 1, got {self.periods}")
        if self.kind == WaveformKind.SQUARE and 2 * self.periods > self.width:
            raise InputValidationError(
                f"Square wave with {self.periods} periods needs width >= {2 * self.periods}")

    def label(self) -> str:
        return self.kind.value


def _sine(spec: WaveformSpec, n: np.ndarray) -> np.ndarray:
    return spec.amplitude * np.sin(2 * np.pi * spec.periods * n / spec.width)


def _ramp(spec: WaveformSpec, n: np.ndarray) -> np.ndarray:
    if spec.bipolar:
        return spec.amplitude * ((2 * n - (spec.width - 1)) / (spec.width - 1))
    return spec.amplitude * n / (spec.width - 1)


def _square(spec: WaveformSpec, n: np.ndarray) -> np.ndarray:
    # Position inside the period in units of 1/width, so boundaries fall on
    # integer comparisons.
    phase = (n * spec.periods) % spec.width
    return np.where(2 * phase < spec.width, spec.amplitude, -spec.amplitude)


def _triangle(spec: WaveformSpec, n: np.ndarray) -> np.ndarray:
    if spec.bipolar:
        # In phase with the sine of the same period: 0 at n = 0, peaks at the
        # quarter periods. q is four times the phase in units of 1/width.
        q = 4 * ((n * spec.periods) % spec.width)
        w = spec.width
        return spec.amplitude * (np.where(q < w, q, np.where(q < 3 * w, 2 * w - q, q - 4 * w)) / w)
    return spec.amplitude * (1 - np.abs(2 * n / (spec.width - 1) - 1))


BIPOLAR_KINDS = (WaveformKind.RAMP, WaveformKind.TRIANGLE)

GENERATORS = {
    WaveformKind.SINE: _sine,
    WaveformKind.RAMP: _ramp,
    WaveformKind.SQUARE: _square,
    WaveformKind.TRIANGLE: _triangle,
}


def generate(spec: WaveformSpec) -> Signal:
    n = np.arange(spec.width, dtype=np.int64)
    return Signal.from_array(0, GENERATORS[spec.kind](spec, n))


def paper_waveforms(width: int = 90):
    """The four test waveforms with their pinned parameters.

    All four are zero-mean: unit amplitude, one period, ramp and triangle
    bipolar.
    """
    return [WaveformSpec(kind, width, bipolar=kind in BIPOLAR_KINDS) for kind in WaveformKind]
