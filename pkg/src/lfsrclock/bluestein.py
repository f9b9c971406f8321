"""Chirp-z (Bluestein) DFT for lengths that are not powers of two.

Used for the q'-sweep of Pauli matrix elements, whose natural length is
``2^n - 1``. ``numpy.fft`` serves as the independent oracle in tests.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=16)
def _chirp(length: int, sign: int):
    m = np.arange(length, dtype=np.int64)
    # reduce m^2 modulo 2N before the float conversion to keep the phase exact
    phase = (m * m) % (2 * length)
    w = np.exp(sign * 1j * np.pi * phase / length)
    size = 1 << int(np.ceil(np.log2(2 * length - 1)))
    kernel = np.zeros(size, dtype=complex)
    kernel[:length] = np.conj(w)
    kernel[size - length + 1:] = np.conj(w[1:])[::-1]
    w.setflags(write=False)
    kernel_f = np.fft.fft(kernel)
    kernel_f.setflags(write=False)
    return w, kernel_f, size


def bluestein_dft(x: np.ndarray, sign: int = -1, axis: int = -1) -> np.ndarray:
    """Unnormalized DFT ``X_k = sum_j x_j exp(sign * 2 pi i j k / N)`` along ``axis``.

    Parameters
    ----------
    x : array_like
        Input, any shape.
    sign : {-1, +1}
        -1 gives the forward transform (``numpy.fft.fft`` convention),
        +1 the unnormalized inverse.
    axis : int
        Axis to transform.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    x = np.moveaxis(np.asarray(x, dtype=complex), axis, -1)
    length = x.shape[-1]
    if length == 0:
        raise ValueError("empty transform")
    w, kernel_f, size = _chirp(length, sign)
    buf = np.zeros(x.shape[:-1] + (size,), dtype=complex)
    buf[..., :length] = x * w
    conv = np.fft.ifft(np.fft.fft(buf, axis=-1) * kernel_f, axis=-1)
    out = conv[..., :length] * w
    return np.moveaxis(out, -1, axis)


def naive_dft(x: np.ndarray, sign: int = -1) -> np.ndarray:
    """Direct O(N^2) DFT of a 1-D array, kept as a test oracle."""
    x = np.asarray(x, dtype=complex)
    length = x.size
    jk = np.outer(np.arange(length), np.arange(length)) % length
    return np.exp(sign * 2j * np.pi * jk / length) @ x
