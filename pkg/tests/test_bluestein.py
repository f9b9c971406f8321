import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lfsrclock.bluestein import bluestein_dft, naive_dft


@pytest.mark.parametrize("length", [1, 2, 3, 7, 15, 63, 255, 1023])
def test_matches_numpy_fft(length):
    rng = np.random.default_rng(length)
    x = rng.normal(size=length) + 1j * rng.normal(size=length)
    assert np.allclose(bluestein_dft(x), np.fft.fft(x), atol=1e-9 * length)
    assert np.allclose(bluestein_dft(x, sign=1), np.fft.ifft(x) * length, atol=1e-9 * length)


@given(st.integers(1, 80), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_matches_naive_dft(length, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=length) + 1j * rng.normal(size=length)
    assert np.allclose(bluestein_dft(x), naive_dft(x), atol=1e-9)
    assert np.allclose(bluestein_dft(x, sign=1), naive_dft(x, sign=1), atol=1e-9)


def test_batched_axis():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(4, 31)) + 0j
    assert np.allclose(bluestein_dft(x, axis=-1), np.fft.fft(x, axis=-1))
    assert np.allclose(bluestein_dft(x.T, axis=0), np.fft.fft(x.T, axis=0))


def test_bad_arguments():
    with pytest.raises(ValueError):
        bluestein_dft(np.ones(3), sign=0)
    with pytest.raises(ValueError):
        bluestein_dft(np.ones(0))
