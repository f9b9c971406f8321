"""Chi eigenstates of maximal-LFSR circuits and their Pauli matrix elements.

``psi_q`` has amplitude ``omega^(q j) / sqrt(N)`` on the state ``alpha^j . one``
with ``N = 2^n - 1`` and ``omega = exp(2 pi i / N)``; it satisfies
``U psi_q = omega^(-q) psi_q``. Matrix elements are evaluated directly from the
discrete-log table of the orbit, without building state vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .bluestein import bluestein_dft
from .errors import check_bytes, get_max_bytes
from .gf2n import DlogTable
from .lfsr import LfsrSpec, PauliLabel, pauli_orbit_representatives, state_dlog_table
from .states import apply_local, entropies, fwht, parity, reduced_density

MAX_STATE_N = 20
HIST_BINS = 200
FINE_BINS = 1 << 16


@lru_cache(maxsize=32)
def orbit_table(spec: LfsrSpec) -> DlogTable:
    """Cached discrete-log table of the LFSR orbit (raises if not maximal)."""
    return state_dlog_table(spec)


@lru_cache(maxsize=64)
def _omega(order: int) -> np.ndarray:
    w = np.exp(2j * np.pi * np.arange(order) / order)
    w.setflags(write=False)
    return w


@dataclass(frozen=True, eq=False)
class ChiState:
    spec: LfsrSpec
    q: int
    amplitudes: np.ndarray

    @property
    def eigenvalue(self) -> complex:
        return complex(np.exp(-2j * np.pi * self.q / self.spec.order))


def _check_q(spec: LfsrSpec, *qs: int):
    for q in qs:
        if not 0 <= q < spec.order:
            raise ValueError(f"q={q} outside [0, {spec.order - 1}]")


def build_chi_state(spec: LfsrSpec, q: int) -> ChiState:
    if spec.n > MAX_STATE_N:
        raise ValueError(f"state vectors are capped at n <= {MAX_STATE_N}")
    _check_q(spec, q)
    tab = orbit_table(spec)
    order = spec.order
    amps = np.zeros(1 << spec.n, dtype=complex)
    j = np.arange(order)
    amps[tab.forward] = _omega(order)[(q * j) % order] / np.sqrt(order)
    amps.setflags(write=False)
    return ChiState(spec, q, amps)


def scar_states(n: int) -> tuple[np.ndarray, np.ndarray]:
    """The two product eigenstates: ``|0...0>`` and ``|+...+>`` (both eigenvalue 1)."""
    dim = 1 << n
    zero = np.zeros(dim, dtype=complex)
    zero[0] = 1
    plus = np.full(dim, dim ** -0.5, dtype=complex)
    return zero, plus


def _element_terms(spec: LfsrSpec, q: int, label: PauliLabel):
    """Sequence ``a_j`` with ``element(q, q') = (1/N) sum_j a_j omega^(q' j)``."""
    tab = orbit_table(spec)
    order = spec.order
    z = tab.forward
    shifted = z ^ label.u
    valid = shifted != 0
    logs = np.where(valid, tab.inverse[shifted], 0)
    phase = _omega(order)[(-q * logs) % order]
    sign = 1 - 2 * parity(z & label.v)
    return np.where(valid, sign * phase, 0)


def pauli_matrix_element(spec: LfsrSpec, q: int, qp: int, label: PauliLabel) -> complex:
    """``<psi_q| X_u Z_v |psi_q'>`` (phase convention: operator is exactly ``X_u Z_v``)."""
    _check_q(spec, q, qp)
    order = spec.order
    a = _element_terms(spec, q, label)
    j = np.arange(order)
    # numpy's sum is pairwise for contiguous arrays
    return complex(np.sum(a * _omega(order)[(qp * j) % order]) / order)


def pauli_matrix_element_naive(spec: LfsrSpec, q: int, qp: int, label: PauliLabel) -> complex:
    """Oracle: contract dense chi states with the dense Pauli matrix."""
    a = build_chi_state(spec, q).amplitudes
    b = build_chi_state(spec, qp).amplitudes
    signs = 1 - 2 * parity(np.arange(1 << spec.n) & label.v)
    pb = np.zeros_like(b)
    pb[np.arange(1 << spec.n) ^ label.u] = signs * b
    return complex(np.vdot(a, pb))


def element_qprime_sweep(spec: LfsrSpec, q: int, label: PauliLabel, method: str = "chirp") -> np.ndarray:
    """All ``q'`` at once: entry ``q'`` of the result is ``element(q, q', label)``."""
    _check_q(spec, q)
    a = _element_terms(spec, q, label)
    return _inverse_dft(a[None, :], method)[0]


def _inverse_dft(a: np.ndarray, method: str) -> np.ndarray:
    order = a.shape[-1]
    if method == "chirp":
        return bluestein_dft(a, sign=1, axis=-1) / order
    if method == "numpy":
        return np.fft.ifft(a, axis=-1)
    raise ValueError(f"unknown transform method {method!r}")


def mu_scale(n: int) -> float:
    """Factor mapping a matrix element to the normalized ``mu``."""
    return ((1 << n) - 1) / 2 ** (1 + n / 2)


def element_bound(n: int) -> float:
    return 2 ** (1 + n / 2) / ((1 << n) - 1)


@dataclass(frozen=True)
class MuSample:
    q: int
    qp: int
    pauli: PauliLabel
    mu: complex


@dataclass
class MuSpectrum:
    """Streaming summary of ``|mu|`` samples, each weighted by its orbit size."""

    n: int
    q: int
    mode: str
    count: int = 0
    max_abs: float = 0.0
    argmax: tuple[int, int] = (-1, -1)
    hist: np.ndarray = field(default_factory=lambda: np.zeros(HIST_BINS, dtype=np.int64))
    fine: np.ndarray = field(default_factory=lambda: np.zeros(FINE_BINS, dtype=np.int64))
    exact_half: int = 0
    violations: int = 0

    def add(self, rep_index: np.ndarray, qps: np.ndarray, abs_mu: np.ndarray):
        flat = abs_mu.ravel()
        self.count += flat.size
        k = int(np.argmax(flat))
        if flat[k] > self.max_abs:
            self.max_abs = float(flat[k])
            r, c = np.unravel_index(k, abs_mu.shape)
            self.argmax = (int(rep_index[r]), int(qps[c]))
        clipped = np.minimum(flat, 1.0)
        self.hist += np.bincount(
            np.minimum((clipped * HIST_BINS).astype(np.int64), HIST_BINS - 1), minlength=HIST_BINS
        )
        self.fine += np.bincount(
            np.minimum((clipped * FINE_BINS).astype(np.int64), FINE_BINS - 1), minlength=FINE_BINS
        )
        self.exact_half += int(np.count_nonzero(np.abs(flat - 0.5) < 1e-9))
        self.violations += int(np.count_nonzero(flat > 1 + 1e-12))

    @property
    def weight(self) -> int:
        """Number of Pauli operators represented (orbit multiplicity ``2^n - 1``)."""
        return self.count * ((1 << self.n) - 1)

    def density(self) -> tuple[np.ndarray, np.ndarray]:
        edges = np.linspace(0.0, 1.0, HIST_BINS + 1)
        return edges, self.hist / max(self.count, 1) * HIST_BINS

    def ks_semicircle(self) -> float:
        """KS distance from the folded semicircle ``p(x) = (4/pi) sqrt(1 - x^2)``."""
        x = np.arange(1, FINE_BINS + 1) / FINE_BINS
        emp = np.cumsum(self.fine) / max(self.count, 1)
        xc = np.minimum(x, 1.0)
        ref = (2 / np.pi) * (xc * np.sqrt(1 - xc * xc) + np.arcsin(xc))
        return float(np.max(np.abs(emp - ref)))

    def window_fraction(self, lo: float, hi: float) -> float:
        a, b = int(round(lo * FINE_BINS)), int(round(hi * FINE_BINS))
        return float(self.fine[a:b].sum()) / max(self.count, 1)

    def spike_fraction(self, lo: float = 0.499, hi: float = 0.501) -> float:
        """Weight in ``[lo, hi)`` in excess of the continuum, estimated from flanks."""
        width = hi - lo
        raw = self.window_fraction(lo, hi)
        flank = self.window_fraction(lo - 5 * width, lo) + self.window_fraction(hi, hi + 5 * width)
        return raw - flank / 10

    def summary(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "mode": self.mode,
            "samples": self.count,
            "pauli_weight": self.weight,
            "weighting": "per Pauli operator (orbit multiplicity 2^n-1); equals per-orbit weighting",
            "max_abs_mu": self.max_abs,
            "argmax_rep_qprime": list(self.argmax),
            "violations": self.violations,
            "ks_semicircle": self.ks_semicircle(),
            "raw_fraction_0.499_0.501": self.window_fraction(0.499, 0.501),
            "spike_fraction_0.499_0.501": self.spike_fraction(),
            "exact_half_fraction": self.exact_half / max(self.count, 1),
        }


def _sign_matrix(spec: LfsrSpec, vs: np.ndarray) -> np.ndarray:
    z = orbit_table(spec).forward
    return (1 - 2 * parity(vs[:, None] & z[None, :])).astype(np.int8)


def mu_blocks(
    spec: LfsrSpec,
    q: int,
    mode: str = "offdiagonal",
    method: str = "chirp",
    chunk: int | None = None,
    max_bytes: int | None = None,
) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield ``(rep_index, u, v, qprimes, mu)`` blocks in a fixed, deterministic order.

    Representatives are indexed ``0`` for ``Z_one`` and ``1 + v`` for
    ``X_one Z_v``. In off-diagonal mode every ``q' != 0`` is swept (``q' = q``
    included, as in a full sweep); diagonal mode keeps ``q' = q`` only.
    """
    if mode not in ("diagonal", "offdiagonal"):
        raise ValueError("mode must be 'diagonal' or 'offdiagonal'")
    n, order = spec.n, spec.order
    if mode == "offdiagonal" and n > 14:
        check_bytes("off-diagonal sweep beyond n = 14", 16 * order * (1 << n), 0)
    if mode == "diagonal" and n > 20:
        check_bytes("diagonal sweep beyond n = 20", 16 * (1 << n), 0)
    _check_q(spec, q)
    if q == 0:
        raise ValueError("q = 0 is excluded from ETH sweeps")
    tab = orbit_table(spec)
    one = spec.one
    scale = mu_scale(n)

    if mode == "diagonal":
        check_bytes("diagonal sweep", 64 * (1 << n), max_bytes)
        # Z_one at q' = q: (1/N) sum_j (-1)^{one . z_j}
        z_elem = pauli_matrix_element(spec, q, q, PauliLabel(0, one))
        # X_one Z_v at q' = q as a Walsh-Hadamard transform over v
        c = np.zeros(1 << n, dtype=complex)
        c[tab.forward] = _element_terms(spec, q, PauliLabel(one, 0)) * _omega(order)[
            (q * np.arange(order)) % order
        ]
        x_elems = fwht(c) / order
        mu = np.concatenate([[z_elem], x_elems]) * scale
        idx = np.arange(1 + (1 << n))
        us = np.where(idx == 0, 0, one)
        vs = np.where(idx == 0, one, idx - 1)
        yield idx, us, vs, np.array([q]), mu[:, None]
        return

    qps = np.arange(1, order)
    # per row: int8 signs, complex terms, padded chirp buffers (x3), result
    row_bytes = order * (1 + 16) + 3 * 16 * (1 << (2 * order - 1).bit_length()) + 16 * order
    if chunk is None:
        budget = min(max_bytes or get_max_bytes(), 1 << 28)
        chunk = max(1, min(1 + (1 << n), budget // row_bytes))
    check_bytes("off-diagonal sweep chunk", chunk * row_bytes, max_bytes)

    base_z = _element_terms(spec, q, PauliLabel(0, one))
    zrow = _inverse_dft(base_z[None, :], method)[0, 1:]
    yield np.array([0]), np.array([0]), np.array([one]), qps, (zrow * scale)[None, :]

    base_x = _element_terms(spec, q, PauliLabel(one, 0))
    for start in range(0, 1 << n, chunk):
        vs = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        a = _sign_matrix(spec, vs) * base_x[None, :]
        elems = _inverse_dft(a, method)[:, 1:]
        yield 1 + vs, np.full(vs.size, one), vs, qps, elems * scale


def mu_spectrum(
    spec: LfsrSpec,
    q: int,
    mode: str = "offdiagonal",
    method: str = "chirp",
    chunk: int | None = None,
    max_bytes: int | None = None,
    sink=None,
) -> MuSpectrum:
    """Accumulate the ``|mu|`` distribution; ``sink(block)`` sees every raw block."""
    out = MuSpectrum(spec.n, q, mode)
    for block in mu_blocks(spec, q, mode, method, chunk, max_bytes):
        idx, _, _, qps, mu = block
        out.add(idx, qps, np.abs(mu))
        if sink is not None:
            sink(block)
    return out


def iter_mu_samples(spec: LfsrSpec, q: int, mode: str = "offdiagonal") -> Iterator[MuSample]:
    """Per-sample view of :func:`mu_blocks`; convenient for small ``n`` only."""
    for _, us, vs, qps, mu in mu_blocks(spec, q, mode):
        for r in range(mu.shape[0]):
            label = PauliLabel(int(us[r]), int(vs[r]))
            for c in range(mu.shape[1]):
                yield MuSample(q, int(qps[c]), label, complex(mu[r, c]))


def max_element_all_q(
    spec: LfsrSpec, method: str = "numpy", qs: Sequence[int] | None = None
) -> tuple[float, int]:
    """Max of ``|<psi_q|P|psi_q'>|`` over all reps and ``q, q' != 0``; also the count
    of (rep, q, q') samples above the element bound."""
    bound = element_bound(spec.n)
    order = spec.order
    qs = range(1, order) if qs is None else qs
    sign = _sign_matrix(spec, np.arange(1 << spec.n, dtype=np.int64))
    best, over = 0.0, 0
    for q in qs:
        base_z = _element_terms(spec, q, PauliLabel(0, spec.one))
        base_x = _element_terms(spec, q, PauliLabel(spec.one, 0))
        rows = np.concatenate([base_z[None, :], sign * base_x[None, :]])
        mag = np.abs(_inverse_dft(rows, method)[:, 1:])
        best = max(best, float(mag.max()))
        over += int(np.count_nonzero(mag > bound * (1 + 1e-12)))
    return best, over


@dataclass(frozen=True)
class EthResidual:
    residual: complex
    bound: float
    op_norm: float
    element: complex


def eth_residual(spec: LfsrSpec, q: int, qp: int, op: np.ndarray, support: Sequence[int]) -> EthResidual:
    """``R = 2^{n/2} (<psi_q|O|psi_q'> - delta_{qq'} Tr(O) / 2^ell)`` and ``2^{2+ell} ||O||``."""
    n = spec.n
    support = list(support)
    if len(support) > n or any(not 0 <= s < n for s in support):
        raise ValueError("support exceeds the register")
    op = np.asarray(op, dtype=complex)
    ell = len(support)
    a = build_chi_state(spec, q).amplitudes
    b = build_chi_state(spec, qp).amplitudes
    elem = complex(np.vdot(a, apply_local(b, n, support, op)))
    thermal = np.trace(op) / (1 << ell) if q == qp else 0.0
    r = 2 ** (n / 2) * (elem - thermal)
    norm = float(np.linalg.norm(op, 2))
    return EthResidual(complex(r), 2 ** (2 + ell) * norm, norm, elem)


def chi_entropy(spec: LfsrSpec, q: int, subsystem: Sequence[int]) -> tuple[float, float]:
    """``(renyi2, von_neumann)`` of the chi state on the given qubits, in nats."""
    psi = build_chi_state(spec, q).amplitudes
    return entropies(reduced_density(psi, spec.n, subsystem))


def entropy_bound(n: int, ell: int) -> float:
    """Lower bound ``ell ln 2 - 2^{4 + 2 ell - n}`` on chi-state entanglement."""
    return ell * np.log(2) - 2.0 ** (4 + 2 * ell - n)


def pauli_purity(spec: LfsrSpec, q: int, subsystem: Sequence[int]) -> float:
    """``2^{-ell} sum_P <P>^2`` over Paulis on the subsystem, from table-based elements."""
    masks = [1 << s for s in subsystem]
    subsets = [0]
    for m in masks:
        subsets += [s | m for s in subsets]
    total = 0.0
    for u in subsets:
        for v in subsets:
            total += abs(pauli_matrix_element(spec, q, q, PauliLabel(u, v))) ** 2
    return total / (1 << len(subsystem))
