"""Dense qubit-register helpers: local operators, reduced density matrices, entropies.

Basis index convention: bit ``i`` of the index is qubit ``i``. A local operator
on ``support = [s_0, s_1, ...]`` uses local index ``sum_k bit_{s_k} 2^k``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def _axes(n: int, support: Sequence[int]) -> list[int]:
    # tensor axis of qubit s is n-1-s; most significant local bit first
    return [n - 1 - s for s in reversed(support)]


def _check_support(n: int, support: Sequence[int]):
    if len(set(support)) != len(support):
        raise ValueError("support has repeated sites")
    if any(not 0 <= s < n for s in support):
        raise ValueError(f"support {list(support)} exceeds register of {n} qubits")


def apply_local(psi: np.ndarray, n: int, support: Sequence[int], op: np.ndarray) -> np.ndarray:
    """``(op on support) ⊗ 1`` applied to ``psi``; extra trailing axes of ``psi`` are carried."""
    _check_support(n, support)
    ell = len(support)
    if op.shape != (1 << ell, 1 << ell):
        raise ValueError("operator shape does not match support size")
    extra = psi.shape[1:]
    t = psi.reshape((2,) * n + extra)
    axes = _axes(n, support)
    t = np.moveaxis(t, axes, range(ell))
    shape = t.shape
    t = (op @ t.reshape(1 << ell, -1)).reshape(shape)
    t = np.moveaxis(t, range(ell), axes)
    return t.reshape(psi.shape)


def bipartition_matrix(psi: np.ndarray, n: int, subsystem: Sequence[int]) -> np.ndarray:
    """Reshape ``psi`` into ``(2^|A|, rest)``; trailing axes of ``psi`` join ``rest``."""
    _check_support(n, subsystem)
    ell = len(subsystem)
    extra = psi.shape[1:]
    t = psi.reshape((2,) * n + extra)
    t = np.moveaxis(t, _axes(n, subsystem), range(ell))
    return t.reshape(1 << ell, -1)


def reduced_density(psi: np.ndarray, n: int, subsystem: Sequence[int]) -> np.ndarray:
    m = bipartition_matrix(psi, n, subsystem)
    return m @ m.conj().T


def renyi2(rho: np.ndarray) -> float:
    purity = float(np.real(np.vdot(rho, rho)))
    return -np.log(purity)


def von_neumann(rho: np.ndarray) -> float:
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log(w)))


def entropies(rho: np.ndarray) -> tuple[float, float]:
    """``(renyi2, von_neumann)`` in nats."""
    w = np.linalg.eigvalsh(rho)
    w = np.clip(w, 0.0, None)
    purity = float(np.sum(w * w))
    nz = w[w > 1e-15]
    return -np.log(purity), float(-np.sum(nz * np.log(nz)))


def trace_norm(a: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(a))))


def parity(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=np.int64, copy=True)
    shift = 32
    while shift:
        x ^= x >> shift
        shift >>= 1
    return x & 1


def popcount(x: int) -> int:
    return bin(x).count("1")


def fwht(a: np.ndarray, axis: int = 0) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform: ``out[v] = sum_z (-1)^{v.z} a[z]``."""
    a = np.moveaxis(np.array(a, copy=True), axis, 0)
    size, rest = a.shape[0], a.shape[1:]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        a = a.reshape((size // (2 * h), 2, h) + rest)
        x, y = a[:, 0].copy(), a[:, 1].copy()
        a[:, 0], a[:, 1] = x + y, x - y
        a = a.reshape((size,) + rest)
        h *= 2
    return np.moveaxis(a, 0, axis)
