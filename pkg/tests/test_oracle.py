import math

import numpy as np
import pytest

from dhtguard.errors import RangeError
from dhtguard.oracle import oracle_forward, oracle_inverse
from dhtguard.signal import Signal, Spectrum
from dhtguard.transform import forward_dht, guarded_forward, inverse_dht


def relative_rms(actual, expected) -> float:
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    scale = np.sqrt(np.mean(expected ** 2))
    diff = np.sqrt(np.mean((actual - expected) ** 2))
    return diff if scale == 0 else diff / scale


def random_instance(seed: int):
    rng = np.random.default_rng(seed)
    width = int(rng.integers(1, 65))
    guard = int(rng.integers(0, 65))
    origin = int(rng.integers(-5, 6))
    return Signal.from_array(origin, rng.normal(size=width)), guard


@pytest.mark.parametrize("signal,k_lo,k_hi", [
    (Signal(0, (0.0, 0.0, 0.0, 0.0)), -2, 5),
    (Signal(0, (1.0,)), -2, 2),
    (Signal(0, (0.0, 1.0)), 0, 3),
])
def test_forward_examples_agree(signal, k_lo, k_hi):
    fast = forward_dht(signal, k_lo, k_hi).values
    slow = oracle_forward(signal, k_lo, k_hi).values
    np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=0)


def test_oracle_impulse_is_exact():
    g = oracle_forward(Signal(0, (1.0,)), -9, 9)
    for k in range(-9, 10):
        expected = 2 / (math.pi * k) if k % 2 else 0.0
        assert abs(g.at(k) - expected) <= 1e-14


def test_oracle_inverse_single_value():
    f = oracle_inverse(Spectrum(-1, (0.0, 0.0, 1.0, 0.0)), 0, 1)
    assert abs(f.samples[0] - 2 / math.pi) <= 1e-14
    assert f.samples[1] == 0.0


def test_oracle_rejects_empty_ranges():
    with pytest.raises(RangeError):
        oracle_forward(Signal(0, (1.0,)), 1, 0)
    with pytest.raises(RangeError):
        oracle_inverse(Spectrum(0, (1.0,)), 1, 0)


@pytest.mark.parametrize("seed", range(100))
def test_matrix_kernel_matches_oracle(seed):
    signal, guard = random_instance(seed)

    fast = guarded_forward(signal, guard)
    slow = oracle_forward(signal, fast.start, fast.stop)
    assert relative_rms(fast.values, slow.values) <= 1e-10

    fast_back = inverse_dht(fast, signal.origin, signal.stop)
    slow_back = oracle_inverse(fast, signal.origin, signal.stop)
    assert relative_rms(fast_back.samples, slow_back.samples) <= 1e-10


def test_small_random_instance_agrees():
    rng = np.random.default_rng(16)
    signal = Signal.from_array(0, rng.normal(size=16))
    fast = guarded_forward(signal, 8)
    slow = oracle_forward(signal, -8, 23)
    assert relative_rms(fast.values, slow.values) <= 1e-10
