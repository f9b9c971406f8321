"""Gauss, Jacobi and mixed character sums over GF(2^n).

Characters live on LFSR states: the multiplicative character is
``chi^r(z) = omega^(r log z)`` with the orbit logarithm, the additive one is
``phi_v(z) = (-1)^(v . z)``. :func:`mixed_sum` deliberately takes a different
route (polynomial-basis arithmetic mapped through the linear isomorphism
``L``) so it can serve as an independent check on the chi-state elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf2n import DlogTable, build_dlog_table, gf_inv_array, gf_mul_array, gf_pow_array
from .lfsr import LfsrSpec, field_isomorphism, gf2_apply, gf2_inv, state_dlog_table
from .states import parity


@dataclass(frozen=True)
class CharacterSpec:
    """``phi_v(z) chi^r(z)``; ``v = 0`` or ``r = 0`` gives the trivial part."""

    v: int
    r: int

    @property
    def additive_trivial(self) -> bool:
        return self.v == 0

    def multiplicative_trivial(self, order: int) -> bool:
        return self.r % order == 0


@dataclass(frozen=True)
class WeilData:
    s: int
    l: int
    d: int
    r: int

    @property
    def C(self) -> int:
        return self.s + self.l + self.d - self.r - 2


@lru_cache(maxsize=32)
def _state_table(spec: LfsrSpec) -> DlogTable:
    return state_dlog_table(spec)


@lru_cache(maxsize=32)
def _poly_tables(spec: LfsrSpec):
    lmat = field_isomorphism(spec)
    return build_dlog_table(spec.poly), lmat, gf2_inv(lmat)


def _omega_pow(exponents: np.ndarray, order: int) -> np.ndarray:
    return np.exp(2j * np.pi * (np.asarray(exponents) % order) / order)


def additive_signs(spec: LfsrSpec, v: int | None = None) -> np.ndarray:
    """``phi_v(alpha^j . one)`` for ``j = 0..N-1``; default ``v`` picks ``z_{n-1}``."""
    v = spec.one if v is None else v
    return (1 - 2 * parity(_state_table(spec).forward & v)).astype(float)


def gauss_sum(spec: LfsrSpec, r: int, v: int | None = None) -> complex:
    """``G(chi^r) = sum_{z != 0} chi^r(z) phi_v(z)``."""
    order = spec.order
    j = np.arange(order)
    return complex(np.sum(additive_signs(spec, v) * _omega_pow(r * j, order)))


def gauss_sums(spec: LfsrSpec, v: int | None = None) -> np.ndarray:
    """``G(chi^r)`` for every ``r`` at once (index ``r``)."""
    s = additive_signs(spec, v)
    return np.fft.ifft(s) * spec.order


def jacobi_sum(spec: LfsrSpec, r1: int, r2: int) -> complex:
    """``J = sum_{z != 0, 1} chi^r1(z) chi^r2(1 + z)`` with ``1`` the field identity."""
    tab = _state_table(spec)
    order = spec.order
    z = tab.forward
    shifted = z ^ spec.one
    ok = shifted != 0
    logs = tab.inverse[shifted[ok]]
    j = np.arange(order)[ok]
    return complex(np.sum(_omega_pow(r1 * j + r2 * logs, order)))


def jacobi_sums(spec: LfsrSpec, r2: int) -> np.ndarray:
    """``J(chi^r1, chi^r2)`` for every ``r1`` at fixed ``r2``."""
    tab = _state_table(spec)
    order = spec.order
    shifted = tab.forward ^ spec.one
    ok = shifted != 0
    b = np.zeros(order, dtype=complex)
    b[ok] = _omega_pow(r2 * tab.inverse[shifted[ok]], order)
    return np.fft.ifft(b) * order


def jacobi_from_gauss(spec: LfsrSpec, r1: int, r2: int, v: int | None = None) -> complex:
    """Right-hand side ``G(chi^r1) G(chi^r2) / G(chi^(r1+r2))``."""
    order = spec.order
    if r1 % order == 0 or r2 % order == 0 or (r1 + r2) % order == 0:
        raise ValueError("all three characters must be nontrivial")
    return gauss_sum(spec, r1, v) * gauss_sum(spec, r2, v) / gauss_sum(spec, r1 + r2, v)


def mixed_sum(spec: LfsrSpec, q: int, qp: int, u: int, v: int) -> complex:
    """``sum_{z != 0, u} phi_v(z) chi(z^q' (z + u)^-q)`` via polynomial-basis arithmetic.

    Field elements are handled as polynomials ``y``; the matching LFSR state
    is ``L y``, so ``phi_v(L y) = (-1)^{(L^T v) . y}`` and ``log(L y) = log_x(y)``.
    """
    if u == 0:
        raise ValueError("u must be nonzero")
    order = spec.order
    poly = spec.poly
    table, lmat, linv = _poly_tables(spec)
    u_poly = gf2_apply(linv, u)
    v_poly = gf2_apply(lmat.T, v)
    y = np.arange(1, 1 << spec.n, dtype=np.int64)
    y = y[y != u_poly]
    num = gf_pow_array(y, qp % order, poly)
    den = gf_pow_array(gf_inv_array(y ^ u_poly, poly), q % order, poly)
    g = gf_mul_array(num, den, poly)
    signs = 1 - 2 * parity(y & v_poly)
    return complex(np.sum(signs * _omega_pow(table.inverse[g], order)))


def weil_constant(q: int, qp: int) -> WeilData:
    """Pole/zero bookkeeping for ``f(z) = z`` and ``g(z) = z^q' (z + u)^-q``.

    After ordering so that ``q <= q'``: ``g`` has a zero at 0 when ``q' > 0``,
    a pole at ``u`` when ``q > 0``, and a zero or pole at infinity when
    ``q' != q``. ``f`` has a simple pole at infinity, shared with ``g`` in the
    last case.
    """
    if q == 0 and qp == 0:
        raise ValueError("(q, q') = (0, 0) gives a trivial multiplicative character")
    if q > qp:
        q, qp = qp, q
    s = int(qp > 0) + int(q > 0) + int(qp != q)
    r = int(qp != q)
    return WeilData(s=s, l=1, d=1, r=r)


def empirical_weil_ratio(spec: LfsrSpec, q: int, qp: int, us=None, vs=None) -> float:
    """``max |mixed_sum| / 2^{n/2}`` over the given (default: all nonzero) ``u``, ``v``."""
    full = range(1, 1 << spec.n)
    best = 0.0
    for u in us or full:
        for v in vs or full:
            best = max(best, abs(mixed_sum(spec, q, qp, u, v)))
    return best / 2 ** (spec.n / 2)


def ceil_ratio(x: float, slack: float = 1e-9) -> int:
    return math.ceil(x - slack)
