"""Direct double-loop evaluation of the transform pair.

Deliberately naive: one Python float accumulator per output, terms visited in
index order. Only tests call this; it is the reference the matrix kernel in
dhtguard.transform is checked against.
"""
import math

from dhtguard.errors import InputValidationError, RangeError
from dhtguard.signal import Signal, Spectrum, SpectrumLike


def oracle_forward(signal: Signal, k_lo: int, k_hi: int) -> Spectrum:
    if k_lo > k_hi:
        raise RangeError(f"Empty index range [{k_lo}, {k_hi}]")
    if not all(math.isfinite(v) for v in signal.samples):
        raise InputValidationError("Signal contains non-finite values")

    values = []
    for k in range(k_lo, k_hi + 1):
        acc = 0.0
        for n in range(signal.origin, signal.stop + 1):
            if (k - n) % 2 == 0:
                continue
            assert abs(k - n) >= 1
            acc += signal.at(n) / (k - n)
        values.append(2.0 / math.pi * acc)
    return Spectrum(k_lo, tuple(values))


def oracle_inverse(spectrum: SpectrumLike, n_lo: int, n_hi: int) -> Signal:
    if n_lo > n_hi:
        raise RangeError(f"Empty index range [{n_lo}, {n_hi}]")
    if not all(math.isfinite(v) for v in spectrum.values):
        raise InputValidationError("Spectrum contains non-finite values")

    samples = []
    for n in range(n_lo, n_hi + 1):
        acc = 0.0
        for k in range(spectrum.start, spectrum.stop + 1):
            if (n - k) % 2 == 0:
                continue
            assert abs(n - k) >= 1
            acc += spectrum.at(k) / (n - k)
        samples.append(-2.0 / math.pi * acc)
    return Signal(n_lo, tuple(samples))
