import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lfsrclock.states import (
    apply_local,
    entropies,
    fwht,
    parity,
    reduced_density,
    renyi2,
    trace_norm,
    von_neumann,
)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return psi / np.linalg.norm(psi)


def dense_local(n, support, op):
    """Oracle: full matrix of op on support, local index sum_k bit_{s_k} 2^k."""
    dim = 1 << n
    rest = ~sum(1 << s for s in support)
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        lc = sum((col >> s & 1) << k for k, s in enumerate(support))
        for lr in range(1 << len(support)):
            row = col & rest
            for k, s in enumerate(support):
                row |= (lr >> k & 1) << s
            full[row, col] += op[lr, lc]
    return full


@pytest.mark.parametrize("support", [[0], [2], [1, 0], [0, 3], [3, 1, 2]])
def test_apply_local_matches_dense(support):
    n = 4
    psi = random_state(n, 1)
    d = 1 << len(support)
    op = np.random.default_rng(2).normal(size=(d, d))
    assert np.allclose(apply_local(psi, n, support, op), dense_local(n, support, op) @ psi)


def test_apply_local_rejects_bad_support():
    with pytest.raises(ValueError):
        apply_local(np.ones(8), 3, [0, 0], np.eye(4))
    with pytest.raises(ValueError):
        apply_local(np.ones(8), 3, [5], np.eye(2))


def test_product_state_entropy_zero():
    psi = np.zeros(16, dtype=complex)
    psi[0] = 1
    for sub in ([0], [1, 3], [0, 1, 2]):
        r2, vn = entropies(reduced_density(psi, 4, sub))
        assert abs(r2) < 1e-12 and abs(vn) < 1e-12


def test_bell_pair():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 2 ** -0.5
    rho = reduced_density(psi, 2, [0])
    assert np.isclose(renyi2(rho), np.log(2))
    assert np.isclose(von_neumann(rho), np.log(2))


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
@settings(max_examples=30, deadline=None)
def test_complement_symmetry_and_ordering(seed, ell):
    n = 6
    psi = random_state(n, seed)
    rng = np.random.default_rng(seed)
    sub = sorted(rng.choice(n, size=ell, replace=False).tolist())
    comp = [i for i in range(n) if i not in sub]
    a = entropies(reduced_density(psi, n, sub))
    b = entropies(reduced_density(psi, n, comp))
    assert np.allclose(a, b, atol=1e-10)
    assert a[1] >= a[0] - 1e-12


def test_trace_norm():
    assert np.isclose(trace_norm(np.diag([1.0, -2.0, 0.5])), 3.5)


def test_parity_and_fwht():
    x = np.arange(64)
    expect = np.array([bin(v).count("1") & 1 for v in x])
    assert np.array_equal(parity(x), expect)
    a = np.random.default_rng(3).normal(size=16)
    h = np.array([[(-1) ** bin(i & j).count("1") for j in range(16)] for i in range(16)])
    assert np.allclose(fwht(a), h @ a)
    with pytest.raises(ValueError):
        fwht(np.ones(6))
