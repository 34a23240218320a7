"""Non-periodic discrete Hilbert transform pair.

    g(k) =  (2/pi) * sum f(n) / (k - n)     over n of opposite parity to k
    f(n) = (-2/pi) * sum g(k) / (n - k)     over k of opposite parity to n

Parity is taken on absolute indices. Sums run over whatever support is
available: the signal for the forward transform, the (guarded) spectrum for
the inverse. That truncation is the source of the reconstruction error.
"""
import logging
import math

import numpy as np

from dhtguard.errors import InputValidationError, RangeError
from dhtguard.signal import GuardedSpectrum, Signal, Spectrum, SpectrumLike


log = logging.getLogger(__name__)

FORWARD_SCALE = 2.0 / math.pi
INVERSE_SCALE = -2.0 / math.pi

# Rows of the kernel matrix evaluated at once; bounds memory for long signals.
BLOCK_ROWS = 2048


def _check_range(lo: int, hi: int):
    if lo > hi:
        raise RangeError(f"Empty index range [{lo}, {hi}]")


def _check_finite(values: np.ndarray, what: str):
    if not np.all(np.isfinite(values)):
        raise InputValidationError(f"{what} contains non-finite values")


def parity_sum(values: np.ndarray, value_idx: np.ndarray, out_idx: np.ndarray, scale: float) -> np.ndarray:
    """scale * sum(values[j] / (out - value_idx[j])) over value_idx of opposite parity to out.

    Each parity class is a dense matrix-vector product, so outputs of one
    parity never read inputs of the same parity.
    """
    out = np.zeros(len(out_idx), dtype=np.float64)
    for parity in (0, 1):
        rows = np.flatnonzero(out_idx % 2 == parity)
        cols = value_idx % 2 != parity
        if len(rows) == 0 or not cols.any():
            continue
        col_idx = value_idx[cols]
        col_values = values[cols]
        for begin in range(0, len(rows), BLOCK_ROWS):
            block = rows[begin:begin + BLOCK_ROWS]
            diff = out_idx[block, None] - col_idx[None, :]
            out[block] = scale * ((1.0 / diff) @ col_values)
    return out


def forward_dht(signal: Signal, k_lo: int, k_hi: int) -> Spectrum:
    _check_range(k_lo, k_hi)
    samples = signal.array()
    _check_finite(samples, "Signal")

    ks = np.arange(k_lo, k_hi + 1, dtype=np.int64)
    values = parity_sum(samples, signal.indices(), ks, FORWARD_SCALE)
    return Spectrum(k_lo, tuple(values.tolist()))


def inverse_dht(spectrum: SpectrumLike, n_lo: int, n_hi: int) -> Signal:
    _check_range(n_lo, n_hi)
    values = spectrum.array()
    _check_finite(values, "Spectrum")

    ns = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    samples = parity_sum(values, spectrum.indices(), ns, INVERSE_SCALE)
    return Signal(n_lo, tuple(samples.tolist()))


def guarded_forward(signal: Signal, m: int) -> GuardedSpectrum:
    """Forward transform over the signal support plus m points on each side."""
    if m < 0:
        raise InputValidationError(f"Guard band must be non-negative, got {m}")
    spectrum = forward_dht(signal, signal.origin - m, signal.stop + m)
    return GuardedSpectrum(signal.origin, signal.width, m, spectrum.values)


def reconstruct_with_guard(signal: Signal, m: int) -> Signal:
    spectrum = guarded_forward(signal, m)
    log.debug(f"Reconstructing N={signal.width} from {spectrum.size} transform points (m={m})")
    return inverse_dht(spectrum, signal.origin, signal.stop)
