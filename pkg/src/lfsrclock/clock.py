"""Feynman-Kitaev clock Hamiltonians for staircase circuits and their analytic eigenstates.

Composite states are stored as arrays of shape ``(2^n, nconf)``: spin basis
index first, then the clock configuration (a single hand position, or an
ordered tuple of hand positions). Flattened vectors are spin-major.

Gate matrices act on wires ``(t, t+1 mod n)`` and are indexed as
``|z_t z_{t+1}>`` with ``z_t`` the more significant bit.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.stats import unitary_group

from .chi import build_chi_state, scar_states
from .errors import PreconditionError, ResourceError, check_bytes
from .lfsr import LfsrSpec, gate_matrix, is_maximal, staircase_gates
from .states import apply_local

MAX_DENSE_DIM = 20000
MAX_CIRCUIT_N = 12


def _gate_support(t: int, n: int) -> list[int]:
    return [(t + 1) % n, t]


@dataclass(frozen=True, eq=False)
class Circuit:
    """Staircase circuit ``u_0 ... u_{n-1}``; flux ``chi`` multiplies ``u_{n-1}``."""

    n: int
    gates: tuple
    chi: float = 0.0
    label: str = "custom"
    lfsr: LfsrSpec | None = None

    def __post_init__(self):
        if len(self.gates) != self.n:
            raise ValueError(f"need {self.n} gates, got {len(self.gates)}")
        if self.n > MAX_CIRCUIT_N:
            raise ValueError(f"dense clock construction is limited to n <= {MAX_CIRCUIT_N}")
        for t, g in enumerate(self.gates):
            g = np.asarray(g)
            if g.shape != (4, 4):
                raise ValueError(f"gate {t} is not 4x4")
            if np.abs(g.conj().T @ g - np.eye(4)).max() > 1e-12:
                raise ValueError(f"gate {t} is not unitary to 1e-12")

    @classmethod
    def from_lfsr(cls, spec: LfsrSpec, chi: float = 0.0) -> "Circuit":
        """Staircase circuit of ``spec``; non-maximal specs fall back to numerical Floquet states."""
        gates = tuple(gate_matrix(g) for g in staircase_gates(spec))
        label = f"lfsr:{spec.n}:{','.join(map(str, spec.tap_list))}"
        return cls(spec.n, gates, chi, label, spec if is_maximal(spec) else None)

    @classmethod
    def identity(cls, n: int, chi: float = 0.0) -> "Circuit":
        return cls(n, tuple(np.eye(4, dtype=complex) for _ in range(n)), chi, f"identity:{n}")

    @classmethod
    def haar(cls, n: int, seed: int, chi: float = 0.0) -> "Circuit":
        """Haar-random two-qubit gates on bonds ``0..n-2``; identity last gate."""
        rng = np.random.Generator(np.random.Philox(seed))
        gates = [unitary_group.rvs(4, random_state=rng) for _ in range(n - 1)]
        gates.append(np.eye(4, dtype=complex))
        return cls(n, tuple(gates), chi, f"haar:{n}:{seed}")

    def with_flux(self, chi: float) -> "Circuit":
        return Circuit(self.n, self.gates, chi, self.label, self.lfsr)

    @property
    def last_is_identity(self) -> bool:
        g = np.asarray(self.gates[-1])
        return bool(np.abs(g - g[0, 0] * np.eye(4)).max() < 1e-12)

    def gate(self, t: int) -> np.ndarray:
        """``u_t`` with the flux folded into the last gate."""
        g = np.asarray(self.gates[t], dtype=complex)
        return g * np.exp(1j * self.chi) if t == self.n - 1 else g

    def apply_gate(self, t: int, psi: np.ndarray, adjoint: bool = False) -> np.ndarray:
        g = self.gate(t)
        return apply_local(psi, self.n, _gate_support(t, self.n), g.conj().T if adjoint else g)

    @cached_property
    def gate_unitaries(self) -> tuple:
        dim = 1 << self.n
        return tuple(self.apply_gate(t, np.eye(dim, dtype=complex)) for t in range(self.n))

    def to_json(self) -> dict:
        if self.label.startswith(("lfsr:", "haar:", "identity:")):
            return {"circuit": self.label, "chi": self.chi}
        return {
            "n": self.n,
            "chi": self.chi,
            "gates": [[[float(x.real), float(x.imag)] for x in np.asarray(g).ravel()] for g in self.gates],
        }

    @classmethod
    def from_json(cls, data) -> "Circuit":
        if isinstance(data, str):
            data = json.loads(data)
        chi = float(data.get("chi", 0.0))
        if "circuit" in data:
            return parse_circuit(data["circuit"], chi)
        gates = tuple(
            np.array([complex(re, im) for re, im in g], dtype=complex).reshape(4, 4) for g in data["gates"]
        )
        return cls(int(data["n"]), gates, chi)


def parse_circuit(text: str, chi: float = 0.0) -> Circuit:
    """``lfsr:N:T1,T2``, ``haar:N:SEED`` or ``identity:N``."""
    kind, _, rest = text.partition(":")
    parts = rest.split(":")
    if kind == "lfsr":
        taps = [int(x) for x in parts[1].split(",") if x] if len(parts) > 1 else []
        return Circuit.from_lfsr(LfsrSpec.from_taps(int(parts[0]), taps), chi)
    if kind == "haar":
        return Circuit.haar(int(parts[0]), int(parts[1]), chi)
    if kind == "identity":
        return Circuit.identity(int(parts[0]), chi)
    raise ValueError(f"unrecognized circuit {text!r}")


# ---------- propagators


def apply_propagator(circ: Circuit, t2: int, t1: int, psi: np.ndarray) -> np.ndarray:
    """``U_{t2:t1} psi`` by sequential gate application."""
    if not (0 <= t1 <= circ.n and 0 <= t2 <= circ.n):
        raise ValueError("propagator indices must lie in 0..n")
    out = psi
    if t2 > t1:
        for t in range(t1, t2):
            out = circ.apply_gate(t, out)
    elif t2 < t1:
        for t in range(t1 - 1, t2 - 1, -1):
            out = circ.apply_gate(t, out, adjoint=True)
    return out


def propagator(circ: Circuit, t2: int, t1: int) -> np.ndarray:
    """Dense ``U_{t2:t1}``: ordered gate product, or its adjoint for ``t2 < t1``."""
    if not (0 <= t1 <= circ.n and 0 <= t2 <= circ.n):
        raise ValueError("propagator indices must lie in 0..n")
    dim = 1 << circ.n
    out = np.eye(dim, dtype=complex)
    if t2 > t1:
        for t in range(t1, t2):
            out = circ.gate_unitaries[t] @ out
    elif t2 < t1:
        for t in range(t2, t1):
            out = out @ circ.gate_unitaries[t].conj().T
    return out


def _check_dense(what: str, dim: int, max_bytes: int | None):
    if dim > MAX_DENSE_DIM:
        raise ResourceError(f"{what} (dimension {dim} > cap {MAX_DENSE_DIM})", 16 * dim * dim, 16 * MAX_DENSE_DIM**2)
    check_bytes(what, 16 * dim * dim, max_bytes)


# ---------- open clock


def build_open_clock(circ: Circuit, psi0: np.ndarray, T: int | None = None, max_bytes=None) -> np.ndarray:
    """``Pi_init + sum_{t<T-1} Pi_tick_t`` on spin (x) clock, clock of length ``T``.

    ``Pi_init = (1 - |psi0><psi0|) (x) |0><0|`` and
    ``Pi_tick_t = 1/2 [u_t |t+1> - |t>][h.c.]``, so the history state has zero energy.
    """
    n = circ.n
    T = n if T is None else T
    if not 1 <= T <= n:
        raise ValueError("clock length must be in 1..n")
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1) > 1e-10:
        raise PreconditionError("initial state is not normalized", abs(np.linalg.norm(psi0) - 1))
    dim = 1 << n
    _check_dense("open clock Hamiltonian", dim * T, max_bytes)
    h = np.zeros((dim, T, dim, T), dtype=complex)
    h[:, 0, :, 0] += np.eye(dim) - np.outer(psi0, psi0.conj())
    eye = np.eye(dim)
    for t in range(T - 1):
        u = circ.gate_unitaries[t]
        h[:, t + 1, :, t + 1] += 0.5 * eye
        h[:, t, :, t] += 0.5 * eye
        h[:, t + 1, :, t] -= 0.5 * u
        h[:, t, :, t + 1] -= 0.5 * u.conj().T
    return h.reshape(dim * T, dim * T)


def history_state(circ: Circuit, psi0: np.ndarray, T: int | None = None) -> np.ndarray:
    """``T^{-1/2} sum_t U_{t:0} psi0 (x) |t>`` as an array of shape ``(2^n, T)``."""
    T = circ.n if T is None else T
    cols = []
    psi = np.asarray(psi0, dtype=complex)
    for t in range(T):
        cols.append(psi)
        if t < T - 1:
            psi = circ.apply_gate(t, psi)
    return np.stack(cols, axis=1) / np.sqrt(T)


# ---------- Floquet states of U_{n:0}


@dataclass(frozen=True, eq=False)
class FloquetState:
    phase: float  # U_{n:0} v = exp(i phase) v
    vector: np.ndarray
    label: str


def floquet_states(circ: Circuit) -> list[FloquetState]:
    """A complete orthonormal eigenbasis of ``U_{n:0}``.

    LFSR circuits use the analytic chi states plus the two product states
    spanning the +1 sector; other circuits use a complex Schur decomposition.
    """
    n = circ.n
    if circ.lfsr is not None:
        spec = circ.lfsr
        order = spec.order
        zero, plus = scar_states(n)
        out = [FloquetState(circ.chi, zero, "scar0"), FloquetState(circ.chi, plus, "scar+")]
        for q in range(1, order):
            phase = circ.chi - 2 * np.pi * q / order
            out.append(FloquetState(phase, build_chi_state(spec, q).amplitudes, f"q={q}"))
        return out
    u = propagator(circ, n, 0)
    tmat, z = scipy.linalg.schur(u, output="complex")
    vals = np.diag(tmat)
    return [FloquetState(float(np.angle(vals[i])), z[:, i], f"schur{i}") for i in range(len(vals))]


def floquet_residual(circ: Circuit, state: np.ndarray, phase: float) -> float:
    return float(np.linalg.norm(apply_propagator(circ, circ.n, 0, state) - np.exp(1j * phase) * state))


def _check_floquet(circ: Circuit, state: np.ndarray, phase: float, tol: float = 1e-10):
    res = floquet_residual(circ, state, phase)
    if res > tol:
        raise PreconditionError("spin state is not an eigenstate of U_{n:0} with the given phase", res)


# ---------- periodic single-hand clock


def build_periodic_single(circ: Circuit, max_bytes=None) -> np.ndarray:
    """``1 - 1/2 sum_t (u_t (x) |t+1><t| + h.c.)`` with ``|n> = |0>``."""
    n = circ.n
    dim = 1 << n
    _check_dense("periodic clock Hamiltonian", dim * n, max_bytes)
    h = np.zeros((dim, n, dim, n), dtype=complex)
    for t in range(n):
        h[:, t, :, t] += np.eye(dim)
    for t in range(n):
        u = circ.gate_unitaries[t]
        h[:, (t + 1) % n, :, t] -= 0.5 * u
        h[:, t, :, (t + 1) % n] -= 0.5 * u.conj().T
    return h.reshape(dim * n, dim * n)


def momenta(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


def single_hand_energy(k: float, phase: float, n: int) -> float:
    return 1 - math.cos(k - phase / n)


def single_hand_eigenstate(circ: Circuit, spin: np.ndarray, phase: float, k: float, check: bool = True):
    """``n^{-1/2} sum_t e^{i(k - phase/n) t} U_{t:0} spin (x) |t>``, shape ``(2^n, n)``."""
    if check:
        _check_floquet(circ, spin, phase)
    n = circ.n
    kappa = k - phase / n
    cols = []
    psi = np.asarray(spin, dtype=complex)
    for t in range(n):
        cols.append(np.exp(1j * kappa * t) * psi)
        if t < n - 1:
            psi = circ.apply_gate(t, psi)
    return CompositeState(n, [(t,) for t in range(n)], np.stack(cols, axis=1) / np.sqrt(n))


def analytic_single_spectrum(phases: Sequence[float], n: int) -> np.ndarray:
    ks = momenta(n)
    return np.sort(np.concatenate([1 - np.cos(ks - p / n) for p in phases]))


def spectral_levels(evals: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Distinct levels of a sorted spectrum (values within ``tol`` are merged)."""
    evals = np.sort(np.asarray(evals))
    keep = np.concatenate([[True], np.diff(evals) > tol])
    return evals[keep]


@dataclass(frozen=True)
class GapReport:
    measured: float
    predicted: float
    ground: float
    ground_degeneracy: int


def spectral_gap(circ: Circuit, M: int = 1, tol: float = 1e-10, max_bytes=None) -> GapReport:
    """Gap between the two lowest distinct levels, dense, and its quadratic estimate.

    The estimate takes the two smallest distinct ``|phase|`` values (folded to
    ``(-pi, pi]``) among the Floquet phases and uses ``E ~ (phase/n)^2 / 2``.
    """
    n = circ.n
    h = build_many_hand(circ, M, max_bytes=max_bytes) if M != 1 else build_periodic_single(circ, max_bytes)
    evals = np.linalg.eigvalsh(h)
    levels = spectral_levels(evals, tol)
    ground = levels[0]
    deg = int(np.count_nonzero(evals < ground + tol))
    phases = np.array([f.phase for f in floquet_states(circ)])
    folded = np.sort(spectral_levels(np.abs(np.angle(np.exp(1j * phases))), 1e-12))
    if M == 1 and folded.size > 1:
        predicted = (folded[1] ** 2 - folded[0] ** 2) / (2 * n * n)
    else:
        predicted = float("nan")
    return GapReport(float(levels[1] - levels[0]), predicted, float(ground), deg)


@dataclass(frozen=True)
class FluxPoint:
    chi: float
    multiplicity: int
    ground: float


def zero_energy_fluxes(circ: Circuit, tol: float = 1e-9) -> list[FluxPoint]:
    """Scan ``chi = -phi`` over the distinct quasienergies of ``U_{n:0}`` at zero flux.

    Each point records the degeneracy of that quasienergy and the dense
    single-hand ground energy at the shifted flux.
    """
    base = circ.with_flux(0.0)
    phases = np.sort(np.mod([f.phase for f in floquet_states(base)], 2 * np.pi))
    groups: list[list[float]] = []
    for p in phases:
        if groups and abs(np.exp(1j * p) - np.exp(1j * groups[-1][0])) < tol:
            groups[-1].append(p)
        else:
            groups.append([p])
    if len(groups) > 1 and abs(np.exp(1j * groups[0][0]) - np.exp(1j * groups[-1][0])) < tol:
        groups[0] += groups.pop()
    out = []
    for g in groups:
        chi = float(np.mod(-g[0], 2 * np.pi))
        ground = float(np.linalg.eigvalsh(build_periodic_single(circ.with_flux(chi)))[0])
        out.append(FluxPoint(chi, len(g), ground))
    return out


def fit_exponent(ns: Sequence[int], values: Sequence[float]) -> float:
    """``-slope`` of ``ln(values)`` against ``n`` (``ln 4`` for ``4^{-n}`` decay)."""
    slope, _ = np.polyfit(np.asarray(ns, dtype=float), np.log(np.asarray(values, dtype=float)), 1)
    return float(-slope)


# ---------- many-hand clock


def hand_configs(n: int, M: int) -> list[tuple[int, ...]]:
    if not 0 <= M <= n:
        raise ValueError("hand count must be in 0..n")
    return list(itertools.combinations(range(n), M))


@dataclass(frozen=True, eq=False)
class CompositeState:
    n: int
    configs: list
    amplitudes: np.ndarray  # shape (2^n, len(configs))

    @property
    def M(self) -> int:
        return len(self.configs[0]) if self.configs else 0

    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _hops(n: int, configs: list) -> list[tuple[int, int, int, int]]:
    """``(dest, src, t, sign)`` for every forward hop ``t -> t+1 mod n``."""
    index = {c: i for i, c in enumerate(configs)}
    out = []
    for i, c in enumerate(configs):
        occ = set(c)
        for t in c:
            tgt = (t + 1) % n
            if tgt in occ:
                continue
            if t < n - 1:
                new = tuple(sorted(occ - {t} | {tgt}))
                out.append((index[new], i, t, 1))
            else:
                # wrap hop: the last hand moves to the front of the tuple
                new = (0,) + c[:-1]
                out.append((index[new], i, t, (-1) ** (len(c) - 1)))
    return out


def build_many_hand(circ: Circuit, M: int, max_bytes=None) -> np.ndarray:
    """``sum_t n_t - 1/2 sum_t (u_t (x) c^dag_{t+1} c_t + h.c.)`` in the ``M``-hand sector."""
    n = circ.n
    if M > 1 and not circ.last_is_identity:
        raise PreconditionError("many-hand sectors require u_{n-1} proportional to identity")
    configs = hand_configs(n, M)
    dim = 1 << n
    _check_dense("many-hand Hamiltonian", dim * len(configs), max_bytes)
    nc = len(configs)
    h = np.zeros((dim, nc, dim, nc), dtype=complex)
    for i in range(nc):
        h[:, i, :, i] += M * np.eye(dim)
    for dest, src, t, sign in _hops(n, configs):
        u = circ.gate_unitaries[t]
        h[:, dest, :, src] -= 0.5 * sign * u
        h[:, src, :, dest] -= 0.5 * sign * u.conj().T
    return h.reshape(dim * nc, dim * nc)


def apply_many_hand(circ: Circuit, state: CompositeState) -> CompositeState:
    """Matrix-free ``H`` acting on a composite state."""
    n, configs = circ.n, state.configs
    a = state.amplitudes
    out = state.M * a.astype(complex)
    for dest, src, t, sign in _hops(n, configs):
        out[:, dest] -= 0.5 * sign * circ.apply_gate(t, a[:, src])
        out[:, src] -= 0.5 * sign * circ.apply_gate(t, a[:, dest], adjoint=True)
    return CompositeState(n, configs, out)


def slater_amplitudes(k_list: Sequence[float], phase: float, n: int, configs=None) -> np.ndarray:
    """``det[e^{i kappa_j t_l}] / n^{M/2}`` with ``kappa = k - phase/n``, per configuration."""
    M = len(k_list)
    configs = hand_configs(n, M) if configs is None else configs
    if M == 0:
        return np.ones(len(configs), dtype=complex)
    kappa = np.asarray(k_list, dtype=float) - phase / n
    ts = np.array(configs, dtype=float)
    mats = np.exp(1j * kappa[None, :, None] * ts[:, None, :])
    return np.linalg.det(mats) / n ** (M / 2)


def _check_momenta(k_list: Sequence[float], n: int):
    idx = [int(round(k * n / (2 * np.pi))) % n for k in k_list]
    if any(abs(k - 2 * np.pi * i / n) > 1e-9 and abs(k - 2 * np.pi * (i - n) / n) > 1e-9 for k, i in zip(k_list, idx)):
        raise ValueError("momenta must lie on the grid 2 pi j / n")
    if len(set(idx)) != len(idx):
        raise ValueError("repeated momenta: a Slater determinant needs distinct momenta")


def krylov_spin_state(circ: Circuit, config: Sequence[int], spin: np.ndarray) -> np.ndarray:
    """``U_{t_1:0} U_{t_2:0} ... U_{t_M:0} spin`` (rightmost factor acts first)."""
    psi = np.asarray(spin, dtype=complex)
    for t in reversed(config):
        psi = apply_propagator(circ, t, 0, psi)
    return psi


def many_hand_eigenstate(circ: Circuit, spin: np.ndarray, phase: float, k_list: Sequence[float], check: bool = True):
    if check:
        _check_floquet(circ, spin, phase)
    if len(k_list) > 1 and not circ.last_is_identity:
        raise PreconditionError("many-hand sectors require u_{n-1} proportional to identity")
    n = circ.n
    _check_momenta(k_list, n)
    configs = hand_configs(n, len(k_list))
    coeffs = slater_amplitudes(k_list, phase, n, configs)
    cols = [coeffs[i] * krylov_spin_state(circ, c, spin) for i, c in enumerate(configs)]
    return CompositeState(n, configs, np.stack(cols, axis=1))


def many_hand_energy(k_list: Sequence[float], phase: float, n: int) -> float:
    return len(k_list) - float(np.sum(np.cos(np.asarray(k_list) - phase / n)))


def analytic_many_spectrum(phases: Sequence[float], n: int, M: int) -> np.ndarray:
    if M == 0:
        return np.zeros(len(phases))
    ks = momenta(n)
    subsets = np.array(list(itertools.combinations(range(n), M)), dtype=np.int64)
    out = []
    for p in phases:
        c = np.cos(ks - p / n)
        out.append(M - c[subsets].sum(axis=1))
    return np.sort(np.concatenate(out))


def residual(h: np.ndarray, vec: np.ndarray, energy: float) -> float:
    return float(np.linalg.norm(h @ vec - energy * vec))


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_theta || a - e^{i theta} b ||``."""
    ov = np.vdot(b, a)
    ph = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(a - ph * b))


# ---------- Fock space (spin (x) 2^n clock occupations) and the entangler V


def _jw_sign(occ: np.ndarray, t: int) -> np.ndarray:
    below = occ & ((1 << t) - 1)
    cnt = np.zeros_like(below)
    for b in range(t):
        cnt += (below >> b) & 1
    return 1 - 2 * (cnt & 1)


def fock_annihilator(n: int, t: int) -> sp.csr_matrix:
    """Jordan-Wigner ``c_t`` on the ``2^n`` clock occupations (bit ``t`` = site ``t``)."""
    occ = np.arange(1 << n)
    src = occ[(occ >> t) & 1 == 1]
    dst = src ^ (1 << t)
    vals = _jw_sign(src, t).astype(complex)
    return sp.csr_matrix((vals, (dst, src)), shape=(1 << n, 1 << n))


def fock_state_index(config: Sequence[int]) -> int:
    """Occupation index of ``c^dag_{t_1} ... c^dag_{t_M} |vacuum>`` (sign is +1 for ascending t)."""
    return sum(1 << t for t in config)


def composite_to_fock(state: CompositeState) -> np.ndarray:
    """Embed an ordered-tuple composite state into spin (x) Fock space (shape ``(2^n, 2^n)``)."""
    n = state.n
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for i, c in enumerate(state.configs):
        out[:, fock_state_index(c)] = state.amplitudes[:, i]
    return out


def fock_hamiltonian(circ: Circuit) -> sp.csr_matrix:
    """``sum_t 1 (x) n_t - 1/2 sum_t (u_t (x) c^dag_{t+1} c_t + h.c.)`` built from JW operators."""
    n = circ.n
    dim = 1 << n
    cs = [fock_annihilator(n, t) for t in range(n)]
    eye_s = sp.identity(dim, dtype=complex, format="csr")
    h = sp.csr_matrix((dim * dim, dim * dim), dtype=complex)
    for t in range(n):
        h = h + sp.kron(eye_s, cs[t].T.conj() @ cs[t])
        hop = sp.kron(sp.csr_matrix(circ.gate_unitaries[t]), cs[(t + 1) % n].T.conj() @ cs[t])
        h = h - 0.5 * (hop + hop.T.conj())
    return h.tocsr()


def entangler_circuit(circ: Circuit) -> sp.csr_matrix:
    """``V = (C_0 U_{0:0}) (C_1 U_{1:0}) ... (C_{n-1} U_{n-1:0})`` on spin (x) Fock space.

    Each controlled propagator is assembled gate by gate from controlled
    two-qubit gates ``C_t u_s``.
    """
    n = circ.n
    if not circ.last_is_identity:
        raise PreconditionError("the entangler requires u_{n-1} proportional to identity")
    dim = 1 << n
    check_bytes("entangler circuit", 16 * dim * dim * (n + 2) * 4, None)
    occ = np.arange(dim)
    v = sp.identity(dim * dim, dtype=complex, format="csr")
    for t in range(n - 1, -1, -1):
        proj1 = sp.diags(((occ >> t) & 1).astype(complex))
        proj0 = sp.diags((1 - ((occ >> t) & 1)).astype(complex))
        ctrl = sp.identity(dim * dim, dtype=complex, format="csr")
        for s in range(t):
            cu = sp.kron(sp.csr_matrix(circ.gate_unitaries[s]), proj1) + sp.kron(sp.identity(dim), proj0)
            ctrl = cu @ ctrl
        v = ctrl @ v
    return v.tocsr()


def slater_fock_state(k_list: Sequence[float], phase: float, n: int) -> np.ndarray:
    """``c^dag_{kappa_1} ... c^dag_{kappa_M} |vacuum>`` by applying JW creation operators."""
    dim = 1 << n
    vec = np.zeros(dim, dtype=complex)
    vec[0] = 1
    cdag = [fock_annihilator(n, t).T.conj() for t in range(n)]
    ts = np.arange(n)
    for k in reversed(list(k_list)):
        kappa = k - phase / n
        mode = sum(np.exp(1j * kappa * t) * cdag[t] for t in ts) / np.sqrt(n)
        vec = mode @ vec
    return vec


def v_route_state(circ: Circuit, spin: np.ndarray, phase: float, k_list: Sequence[float], v=None) -> np.ndarray:
    """``V (spin (x) Slater)`` as a spin (x) Fock array of shape ``(2^n, 2^n)``."""
    n = circ.n
    v = entangler_circuit(circ) if v is None else v
    product = np.kron(np.asarray(spin, dtype=complex), slater_fock_state(k_list, phase, n))
    return (v @ product).reshape(1 << n, 1 << n)


def dressed_current(circ: Circuit, state: CompositeState, t: int) -> float:
    """``<i (u_t (x) c^dag_{t+1} c_t - h.c.)>`` for a bulk bond ``t <= n-2``."""
    n = circ.n
    if not 0 <= t <= n - 2:
        raise ValueError("dressed current is defined for bonds 0..n-2")
    if state.M == 0:
        return 0.0
    a = state.amplitudes
    fwd = 0j
    for dest, src, tt, sign in _hops(n, state.configs):
        if tt == t:
            fwd += np.vdot(a[:, dest], sign * circ.apply_gate(t, a[:, src]))
    return float(-2 * fwd.imag)


def plain_current_fock(fock_state: np.ndarray, n: int, t: int) -> float:
    """``<i (c^dag_{t+1} c_t - h.c.)>`` on a spin (x) Fock array, spin acted on trivially."""
    op = fock_annihilator(n, t + 1).T.conj() @ fock_annihilator(n, t)
    vals = (op @ fock_state.T).T
    fwd = np.vdot(fock_state, vals)
    return float(-2 * fwd.imag)


def slater_current(k_list: Sequence[float], phase: float, n: int) -> float:
    """Plain bond current of the twisted Slater state: ``(2/n) sum_j sin(k_j - phase/n)``."""
    return float(2 / n * np.sum(np.sin(np.asarray(k_list) - phase / n)))
