"""Fibonacci-form LFSRs, their staircase SWAP/CNOT circuits, and Pauli orbits.

A classical state is an ``n``-bit mask whose bit ``i`` is ``z_i``; the same
mask indexes the computational basis state of qubit ``i``. One update is

    z'_i = z_{i+1}                          (i < n-1)
    z'_{n-1} = z_0 + sum_{i>=1} a_i z_i     (mod 2)

The seed of every orbit is the string ``(z_0, ..., z_{n-1}) = (0, ..., 0, 1)``,
i.e. the mask ``1 << (n-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .gf2n import DlogTable, PrimitivePoly
from .states import parity as _parity

# Reference maximal LFSRs for the Pauli-statistics runs, keyed by n.
PUBLISHED_TAPS: dict[int, tuple[int, ...]] = {
    9: (4,),
    10: (3,),
    11: (2,),
    12: (1, 2, 8),
    13: (1, 2, 5),
    14: (1, 2, 13),
    15: (1,),
    16: (1, 3, 12),
    17: (3,),
    18: (7,),
}

# The printed n = 14 entry x^14 + x^13 + x^2 + x + 1 is not primitive ([x] has
# order 4445), nor is its reciprocal. The nearest primitive pentanomial with the
# same low taps is substituted wherever a working spec is needed.
PUBLISHED_TAP_CORRECTIONS: dict[int, tuple[int, ...]] = {14: (1, 2, 12)}

# Worked n = 8 staircase example.
EXAMPLE_N8_TAPS: tuple[int, ...] = (2, 3, 4)

# Small maximal instances used for dense checks (primitive trinomials).
SMALL_TAPS: dict[int, tuple[int, ...]] = {
    2: (1,),
    3: (1,),
    4: (1,),
    5: (2,),
    6: (1,),
    7: (1,),
    8: EXAMPLE_N8_TAPS,
}


class NotMaximalError(ValueError):
    """The LFSR does not have a single nontrivial orbit of length 2^n - 1."""


@dataclass(frozen=True)
class LfsrSpec:
    n: int
    taps: int  # bit i set <=> a_i = 1, for 1 <= i <= n-1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.taps & 1 or self.taps >> self.n - 1 >> 1:
            raise ValueError("taps must be a mask over indices 1..n-1")

    @classmethod
    def from_taps(cls, n: int, taps: Iterable[int]) -> "LfsrSpec":
        mask = 0
        for i in taps:
            if not 1 <= i <= n - 1:
                raise ValueError(f"tap {i} outside 1..{n - 1}")
            mask |= 1 << i
        return cls(n, mask)

    @classmethod
    def published(cls, n: int, corrected: bool = True) -> "LfsrSpec":
        """Listed LFSR for ``n``; ``corrected`` swaps in the maximal substitutes."""
        if corrected and n in PUBLISHED_TAP_CORRECTIONS:
            return cls.from_taps(n, PUBLISHED_TAP_CORRECTIONS[n])
        return cls.from_taps(n, PUBLISHED_TAPS[n])

    @classmethod
    def default(cls, n: int) -> "LfsrSpec":
        """Reference entry if there is one, else a small known-maximal instance."""
        if n in PUBLISHED_TAPS:
            return cls.published(n)
        if n in SMALL_TAPS:
            return cls.from_taps(n, SMALL_TAPS[n])
        raise KeyError(f"no built-in maximal LFSR for n={n}")

    @property
    def tap_list(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.n) if self.taps >> i & 1)

    @property
    def poly(self) -> PrimitivePoly:
        return PrimitivePoly(self.n, (1 << self.n) | self.taps | 1)

    @property
    def one(self) -> int:
        return 1 << (self.n - 1)

    @property
    def order(self) -> int:
        return (1 << self.n) - 1

    def to_json(self) -> dict:
        return {"n": self.n, "taps": list(self.tap_list), "poly": self.poly.to_json()}


def _feedback_mask(spec: LfsrSpec) -> int:
    return spec.taps | 1


def lfsr_step(state: int, spec: LfsrSpec) -> int:
    fb = bin(state & _feedback_mask(spec)).count("1") & 1
    return (state >> 1) | (fb << (spec.n - 1))


def lfsr_step_array(states: np.ndarray, spec: LfsrSpec) -> np.ndarray:
    states = np.asarray(states, dtype=np.int64)
    fb = _parity(states & _feedback_mask(spec))
    return (states >> 1) | (fb << (spec.n - 1))


def orbit(spec: LfsrSpec, start: int | None = None) -> np.ndarray:
    """States visited from ``start`` until the first return (start included)."""
    if start is None:
        start = spec.one
    if start == 0:
        raise ValueError("the all-zero state is a fixed point; orbit start must be nonzero")
    if not 0 < start < (1 << spec.n):
        raise ValueError("start is not an n-bit state")
    out = [start]
    z = lfsr_step(start, spec)
    while z != start:
        out.append(z)
        z = lfsr_step(z, spec)
        if len(out) > spec.order:
            raise AssertionError("orbit longer than 2^n - 1; step is not a bijection")
    return np.array(out, dtype=np.int64)


def is_maximal(spec: LfsrSpec) -> bool:
    return len(orbit(spec)) == spec.order


def require_maximal(spec: LfsrSpec) -> LfsrSpec:
    if not is_maximal(spec):
        raise NotMaximalError(f"LFSR n={spec.n} taps={list(spec.tap_list)} is not maximal")
    return spec


def state_dlog_table(spec: LfsrSpec) -> DlogTable:
    """Discrete log on LFSR states: ``forward[j] = alpha^j . one``."""
    orb = orbit(spec)
    if len(orb) != spec.order:
        raise NotMaximalError(
            f"LFSR n={spec.n} taps={list(spec.tap_list)} has orbit length {len(orb)}"
        )
    return DlogTable.from_forward(spec.n, orb)


# ---------- binary linear algebra


def alpha_matrix(spec: LfsrSpec) -> np.ndarray:
    """``n x n`` matrix over GF(2) with ``z' = alpha z`` (``z`` as a bit column)."""
    n = spec.n
    a = np.zeros((n, n), dtype=np.uint8)
    for i in range(n - 1):
        a[i, i + 1] = 1
    a[n - 1, 0] = 1
    for i in spec.tap_list:
        a[n - 1, i] = 1
    return a


def mask_to_bits(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=np.uint8)


def bits_to_mask(bits: np.ndarray) -> int:
    return int(sum(int(b) << i for i, b in enumerate(bits)))


def gf2_apply(mat: np.ndarray, mask: int) -> int:
    return bits_to_mask(mat.astype(np.int64) @ mask_to_bits(mask, mat.shape[1]) % 2)


def gf2_apply_array(mat: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Apply a GF(2) matrix to an array of masks at once."""
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros_like(masks)
    for i in range(mat.shape[0]):
        row_mask = bits_to_mask(mat[i])
        out |= _parity(masks & row_mask) << i
    return out


def gf2_rank(mat: np.ndarray) -> int:
    m = mat.copy().astype(np.uint8) % 2
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, c]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] ^= m[rank]
        rank += 1
    return rank


def gf2_det(mat: np.ndarray) -> int:
    return int(gf2_rank(mat) == mat.shape[0])


def gf2_inv(mat: np.ndarray) -> np.ndarray:
    n = mat.shape[0]
    aug = np.concatenate([mat.astype(np.uint8) % 2, np.eye(n, dtype=np.uint8)], axis=1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if aug[r, c]), None)
        if pivot is None:
            raise np.linalg.LinAlgError("singular over GF(2)")
        aug[[c, pivot]] = aug[[pivot, c]]
        for r in range(n):
            if r != c and aug[r, c]:
                aug[r] ^= aug[c]
    return aug[:, n:]


# ---------- Galois form and the field isomorphism


def galois_step(state: int, poly: PrimitivePoly) -> int:
    """Multiplication by ``[x]`` in the polynomial basis (Galois-form LFSR)."""
    z = state << 1
    if z >> poly.degree & 1:
        z ^= poly.coeff_mask
    return z


def galois_orbit(poly: PrimitivePoly, start: int = 1) -> np.ndarray:
    out = [start]
    z = galois_step(start, poly)
    while z != start:
        out.append(z)
        z = galois_step(z, poly)
        if len(out) >= 1 << poly.degree:
            raise AssertionError("orbit did not close")
    return np.array(out, dtype=np.int64)


def field_isomorphism(spec: LfsrSpec) -> np.ndarray:
    """GF(2)-linear map ``L`` with ``L [x]^j = alpha^j . one`` for all ``j``.

    Column ``i`` is ``alpha^i . one``; since ``alpha`` satisfies the feedback
    polynomial, agreement on the basis ``1, x, ..., x^{n-1}`` extends to all
    powers.
    """
    n = spec.n
    cols = []
    z = spec.one
    for _ in range(n):
        cols.append(mask_to_bits(z, n))
        z = lfsr_step(z, spec)
    return np.stack(cols, axis=1)


# ---------- staircase circuit


@dataclass(frozen=True)
class Gate:
    """Gate ``u_site`` on wires ``(site, site+1 mod n)``."""

    site: int
    cnot: bool
    identity: bool = False

    @property
    def kind(self) -> str:
        if self.identity:
            return "identity"
        return "cnot-swap" if self.cnot else "swap"

    def to_json(self) -> dict:
        return {"site": self.site, "cnot": self.cnot, "kind": self.kind}


SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
# control = first wire, target = second wire; local index = 2*z_first + z_second
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def staircase_gates(spec: LfsrSpec) -> list[Gate]:
    """``u_t = CNOT_{t,t+1}^{a_{t+1}} SWAP_{t,t+1}`` for ``t <= n-2``; ``u_{n-1} = 1``.

    After the swap in ``u_t`` wire ``t+1`` carries the running feedback sum
    and wire ``t`` carries ``z_{t+1}``, so the CNOT of gate ``t`` adds tap
    ``a_{t+1}``.
    """
    gates = [Gate(t, bool(spec.taps >> (t + 1) & 1)) for t in range(spec.n - 1)]
    gates.append(Gate(spec.n - 1, False, identity=True))
    return gates


def gate_matrix(gate: Gate) -> np.ndarray:
    if gate.identity:
        return np.eye(4, dtype=complex)
    return CNOT @ SWAP if gate.cnot else SWAP.copy()


def apply_gate_bits(state: int, gate: Gate, n: int) -> int:
    """Classical action of one staircase gate on a basis-state mask."""
    if gate.identity:
        return state
    a, b = gate.site, (gate.site + 1) % n
    za, zb = state >> a & 1, state >> b & 1
    za, zb = zb, za
    if gate.cnot:
        zb ^= za
    state &= ~((1 << a) | (1 << b))
    return state | (za << a) | (zb << b)


def floquet_permutation(spec: LfsrSpec) -> np.ndarray:
    """``perm[z]`` = image of basis state ``z`` under the full gate sequence."""
    gates = staircase_gates(spec)
    perm = np.empty(1 << spec.n, dtype=np.int64)
    for z in range(1 << spec.n):
        s = z
        for g in gates:
            s = apply_gate_bits(s, g, spec.n)
        perm[z] = s
    return perm


def floquet_unitary(spec: LfsrSpec) -> np.ndarray:
    """Dense permutation matrix; intended for tests at small ``n``."""
    if spec.n > 10:
        raise ValueError("dense unitaries are limited to n <= 10")
    perm = floquet_permutation(spec)
    dim = 1 << spec.n
    u = np.zeros((dim, dim), dtype=complex)
    u[perm, np.arange(dim)] = 1
    return u


# ---------- Pauli labels


@dataclass(frozen=True, order=True)
class PauliLabel:
    """``X_u Z_v`` with phases dropped."""

    u: int
    v: int

    @property
    def is_identity(self) -> bool:
        return self.u == 0 and self.v == 0

    @property
    def hermitian_power(self) -> int:
        """``k`` such that ``i^k X_u Z_v`` is Hermitian."""
        return bin(self.u & self.v).count("1") % 4

    def matrix(self, n: int, hermitian: bool = False) -> np.ndarray:
        dim = 1 << n
        z = np.arange(dim)
        signs = 1 - 2 * _parity(z & self.v)
        m = np.zeros((dim, dim), dtype=complex)
        m[z ^ self.u, z] = signs
        if hermitian:
            m *= 1j ** self.hermitian_power
        return m

    def support(self) -> int:
        return self.u | self.v


def pauli_conjugate(spec: LfsrSpec, label: PauliLabel, alpha_inv=None, alpha_t=None) -> PauliLabel:
    """Label of ``U^dag P U``: ``X_u -> X_{alpha^-1 u}``, ``Z_v -> Z_{alpha^T v}``."""
    if alpha_inv is None:
        alpha_inv = gf2_inv(alpha_matrix(spec))
    if alpha_t is None:
        alpha_t = alpha_matrix(spec).T
    return PauliLabel(gf2_apply(alpha_inv, label.u), gf2_apply(alpha_t, label.v))


def pauli_orbit(spec: LfsrSpec, label: PauliLabel) -> list[PauliLabel]:
    a = alpha_matrix(spec)
    a_inv, a_t = gf2_inv(a), a.T.copy()
    out = [label]
    cur = pauli_conjugate(spec, label, a_inv, a_t)
    while cur != label:
        out.append(cur)
        cur = pauli_conjugate(spec, cur, a_inv, a_t)
    return out


def pauli_orbit_arrays(spec: LfsrSpec, u0: np.ndarray, v0: np.ndarray, steps: int):
    """Vectorized orbits: arrays ``(steps, len(u0))`` of conjugated labels."""
    a = alpha_matrix(spec)
    a_inv, a_t = gf2_inv(a), a.T.copy()
    us = np.empty((steps, len(u0)), dtype=np.int64)
    vs = np.empty((steps, len(v0)), dtype=np.int64)
    u, v = np.asarray(u0, dtype=np.int64), np.asarray(v0, dtype=np.int64)
    for s in range(steps):
        us[s], vs[s] = u, v
        u = gf2_apply_array(a_inv, u)
        v = gf2_apply_array(a_t, v)
    return us, vs


def pauli_orbit_representatives(spec: LfsrSpec) -> list[PauliLabel]:
    """One label per orbit: ``Z_one`` then ``X_one Z_v`` for every ``v``."""
    require_maximal(spec)
    one = spec.one
    return [PauliLabel(0, one)] + [PauliLabel(one, v) for v in range(1 << spec.n)]
