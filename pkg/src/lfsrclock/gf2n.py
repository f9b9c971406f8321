"""Arithmetic in GF(2^n) with elements stored as integer bit masks.

Bit ``i`` of a mask is the coefficient of ``x**i`` in the polynomial basis,
so the field element ``1`` is the mask ``1`` and addition is XOR.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_DEGREE = 24


@dataclass(frozen=True)
class PrimitivePoly:
    """Degree-``n`` polynomial over GF(2), stored as an ``(n+1)``-bit mask.

    The dataclass does not enforce primitivity on construction (the search
    code needs to hold candidates); use :func:`is_primitive` to check.
    """

    degree: int
    coeff_mask: int

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.coeff_mask >> self.degree != 1:
            raise ValueError(
                f"mask {self.coeff_mask:#x} does not have degree {self.degree}"
            )

    @classmethod
    def from_taps(cls, n: int, taps: Iterable[int]) -> "PrimitivePoly":
        """``x^n + sum_{i in taps} x^i + 1``; taps are indices in 1..n-1."""
        mask = (1 << n) | 1
        for i in taps:
            if not 1 <= i <= n - 1:
                raise ValueError(f"tap {i} outside 1..{n - 1}")
            mask |= 1 << i
        return cls(n, mask)

    @property
    def taps(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.degree) if self.coeff_mask >> i & 1)

    @property
    def low_mask(self) -> int:
        """Reduction mask: ``x^n`` is congruent to this polynomial."""
        return self.coeff_mask ^ (1 << self.degree)

    def to_json(self) -> dict:
        return {"degree": self.degree, "mask": hex(self.coeff_mask)}

    @classmethod
    def from_json(cls, data: dict) -> "PrimitivePoly":
        return cls(int(data["degree"]), int(data["mask"], 16))

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            if self.coeff_mask >> i & 1:
                terms.append("1" if i == 0 else ("x" if i == 1 else f"x^{i}"))
        return " + ".join(terms)


def _check_element(a: int, n: int):
    if not 0 <= a < (1 << n):
        raise ValueError(f"{a:#x} is not an element of GF(2^{n})")


def gf_mul(a: int, b: int, p: PrimitivePoly) -> int:
    """Shift-and-XOR product of ``a`` and ``b`` reduced modulo ``p``."""
    n = p.degree
    _check_element(a, n)
    _check_element(b, n)
    top = 1 << n
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= p.coeff_mask
    return result


def gf_mul_array(a: np.ndarray, b, p: PrimitivePoly) -> np.ndarray:
    """Elementwise field product of integer arrays (or an array and a scalar)."""
    n = p.degree
    a = np.asarray(a, dtype=np.int64).copy()
    b = np.broadcast_to(np.asarray(b, dtype=np.int64), a.shape).copy()
    top = 1 << n
    result = np.zeros(a.shape, dtype=np.int64)
    for _ in range(n):
        result ^= np.where(b & 1, a, 0)
        b >>= 1
        a <<= 1
        a ^= np.where(a & top, p.coeff_mask, 0)
    return result


def gf_pow(a: int, e: int, p: PrimitivePoly) -> int:
    """Square-and-multiply exponentiation; ``e`` may be any nonnegative int."""
    if e < 0:
        raise ValueError("negative exponent; use gf_inv first")
    result = 1
    base = a
    while e:
        if e & 1:
            result = gf_mul(result, base, p)
        base = gf_mul(base, base, p)
        e >>= 1
    return result


def gf_pow_array(a: np.ndarray, e: int, p: PrimitivePoly) -> np.ndarray:
    if e < 0:
        raise ValueError("negative exponent")
    a = np.asarray(a, dtype=np.int64)
    result = np.ones(a.shape, dtype=np.int64)
    base = a.copy()
    while e:
        if e & 1:
            result = gf_mul_array(result, base, p)
        base = gf_mul_array(base, base, p)
        e >>= 1
    return result


def gf_inv(a: int, p: PrimitivePoly) -> int:
    """Multiplicative inverse as ``a^(2^n - 2)``.

    Raises
    ------
    ZeroDivisionError
        If ``a`` is zero.
    """
    if a == 0:
        raise ZeroDivisionError("zero has no multiplicative inverse")
    return gf_pow(a, (1 << p.degree) - 2, p)


def gf_inv_array(a: np.ndarray, p: PrimitivePoly) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if np.any(a == 0):
        raise ZeroDivisionError("zero has no multiplicative inverse")
    return gf_pow_array(a, (1 << p.degree) - 2, p)


def _coerce_poly(p, n: int | None) -> PrimitivePoly:
    if isinstance(p, PrimitivePoly):
        if n is not None and n != p.degree:
            raise ValueError(f"degree mismatch: polynomial has degree {p.degree}, expected {n}")
        return p
    mask = int(p)
    if n is None:
        n = mask.bit_length() - 1
    if mask.bit_length() - 1 != n:
        raise ValueError(f"degree mismatch: mask {mask:#x} is not of degree {n}")
    return PrimitivePoly(n, mask)


def x_order(p: PrimitivePoly) -> int:
    """Multiplicative order of ``[x]`` modulo ``p`` by direct orbit iteration.

    Returns 0 when ``x`` is not a unit (constant term zero).
    """
    if not p.coeff_mask & 1:
        return 0
    n = p.degree
    top = 1 << n
    z = 1
    for step in range(1, 1 << n):
        z <<= 1
        if z & top:
            z ^= p.coeff_mask
        if z == 1:
            return step
    raise AssertionError("unit group order exceeded; unreachable")


def is_primitive(p, n: int | None = None) -> bool:
    """True iff ``p`` is primitive of degree ``n``.

    Order ``2^n - 1`` of ``[x]`` already forces irreducibility: for a reducible
    modulus the unit group of GF(2)[x]/(p) is strictly smaller than that.
    """
    p = _coerce_poly(p, n)
    if p.degree > MAX_DEGREE:
        raise ValueError(f"degree {p.degree} exceeds supported maximum {MAX_DEGREE}")
    return x_order(p) == (1 << p.degree) - 1


def find_primitive_polys(
    n: int, fixed_low_coeffs: Sequence[int] | None = None, chunk: int = 1 << 14
) -> list[PrimitivePoly]:
    """Exhaustive search over degree-``n`` polynomials with constant term 1.

    ``fixed_low_coeffs`` pins ``a_1, a_2, ...`` (in that order) to the given
    bits. All candidates are iterated simultaneously as a numpy orbit, so the
    cost is ``2^n`` vectorized steps per chunk of candidates.
    """
    if not 2 <= n <= MAX_DEGREE:
        raise ValueError(f"n must be in 2..{MAX_DEGREE}")
    fixed = list(fixed_low_coeffs or [])
    if len(fixed) > n - 1:
        raise ValueError("more fixed coefficients than free taps")
    fixed_bits = 0
    for i, bit in enumerate(fixed, start=1):
        if bit not in (0, 1):
            raise ValueError("fixed coefficients must be 0 or 1")
        fixed_bits |= bit << i
    n_fixed = len(fixed)
    free = n - 1 - n_fixed
    base = (1 << n) | 1 | fixed_bits
    masks = base | (np.arange(1 << free, dtype=np.int64) << (1 + n_fixed))

    order = (1 << n) - 1
    top = 1 << n
    found: list[int] = []
    for start in range(0, masks.size, chunk):
        cand = masks[start:start + chunk]
        z = np.ones(cand.size, dtype=np.int64)
        alive = np.ones(cand.size, dtype=bool)
        for _ in range(order - 1):
            z <<= 1
            z ^= np.where(z & top, cand, 0)
            alive &= z != 1
        # alive: no early return to 1; now check that step `order` closes the orbit
        z <<= 1
        z ^= np.where(z & top, cand, 0)
        alive &= z == 1
        found.extend(int(m) for m in cand[alive])
    return [PrimitivePoly(n, m) for m in sorted(found)]


def prime_factors(m: int) -> list[int]:
    """Distinct prime factors by trial division."""
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out.append(m)
    return out


def euler_phi(m: int) -> int:
    result = m
    for f in prime_factors(m):
        result -= result // f
    return result


def primitive_count(n: int) -> int:
    """Number of primitive polynomials of degree ``n``: ``phi(2^n - 1) / n``."""
    return euler_phi((1 << n) - 1) // n


@dataclass(frozen=True, eq=False)
class DlogTable:
    """Exponent/logarithm tables for a generator of the multiplicative group.

    ``forward[j]`` is the element ``g^j`` (starting from ``forward[0]``, the
    identity in the chosen representation); ``inverse[z]`` is ``log_g(z)``,
    with ``inverse[0] = -1``.
    """

    n: int
    forward: np.ndarray
    inverse: np.ndarray

    @property
    def order(self) -> int:
        return (1 << self.n) - 1

    @property
    def one(self) -> int:
        return int(self.forward[0])

    def log(self, z):
        if np.any(np.asarray(z) == 0):
            raise ValueError("log of zero is undefined")
        return self.inverse[z]

    def exp(self, j):
        return self.forward[np.mod(j, self.order)]

    def mul(self, a, b):
        """Field product via logs; zero-safe, works elementwise on arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la = self.inverse[a]
        lb = self.inverse[b]
        prod = self.forward[(la + lb) % self.order]
        out = np.where((a == 0) | (b == 0), 0, prod)
        return int(out) if out.ndim == 0 else out

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no multiplicative inverse")
        out = self.forward[(-self.inverse[a]) % self.order]
        return int(out) if out.ndim == 0 else out

    @classmethod
    def from_forward(cls, n: int, forward: np.ndarray) -> "DlogTable":
        forward = np.asarray(forward, dtype=np.int64)
        order = (1 << n) - 1
        if forward.shape != (order,):
            raise ValueError(f"forward table must have length {order}")
        inverse = np.full(1 << n, -1, dtype=np.int64)
        inverse[forward] = np.arange(order, dtype=np.int64)
        if inverse[0] != -1 or np.count_nonzero(inverse >= 0) != order:
            raise ValueError("forward table is not a bijection onto nonzero elements")
        forward.setflags(write=False)
        inverse.setflags(write=False)
        return cls(n, forward, inverse)


def build_dlog_table(p: PrimitivePoly) -> DlogTable:
    """Powers of ``[x]`` starting at 1, in the polynomial basis.

    Raises ``ValueError`` as soon as the orbit of ``[x]`` closes early, i.e.
    when ``p`` is not primitive.
    """
    n = p.degree
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds supported maximum {MAX_DEGREE}")
    order = (1 << n) - 1
    top = 1 << n
    forward = np.empty(order, dtype=np.int64)
    z = 1
    for j in range(order):
        if j and z == 1:
            raise ValueError(f"{p} is not primitive: [x] has order {j}")
        forward[j] = z
        z <<= 1
        if z & top:
            z ^= p.coeff_mask
    if z != 1:
        raise ValueError(f"{p} is not primitive")
    return DlogTable.from_forward(n, forward)
