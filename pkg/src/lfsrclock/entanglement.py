"""Entanglement of chi states and clock eigenstates on spin-clock ladder intervals.

A composite clock state is embedded in spin (x) Fock space and treated as a
``2n``-qubit register: qubit ``j < n`` is the occupation of clock site ``j``,
qubit ``n + i`` is spin ``i``. At fixed particle number the Jordan-Wigner
reordering needed to bring an interval's modes together only conjugates the
reduced density matrix by a diagonal sign matrix, so entropies computed this
way equal the fermionic ones.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .chi import build_chi_state, entropy_bound
from .clock import (
    Circuit,
    CompositeState,
    FloquetState,
    build_many_hand,
    composite_to_fock,
    floquet_states,
    hand_configs,
    krylov_spin_state,
    many_hand_eigenstate,
    many_hand_energy,
    momenta,
    single_hand_eigenstate,
)
from .errors import ResourceError
from .lfsr import LfsrSpec
from .states import entropies, reduced_density, trace_norm

MAX_RDM_QUBITS = 16


@dataclass(frozen=True)
class LadderInterval:
    start: int
    ell: int
    n: int

    def __post_init__(self):
        if not 0 <= self.ell <= self.n:
            raise ValueError("interval length must be in 0..n")
        if not 0 <= self.start < self.n:
            raise ValueError("interval start must be in 0..n-1")

    @property
    def sites(self) -> list[int]:
        return [(self.start + i) % self.n for i in range(self.ell)]

    @property
    def wraps(self) -> bool:
        """True when the interval contains the bond ``n-1 -> 0``."""
        return self.start + self.ell > self.n

    @property
    def contains_origin(self) -> bool:
        return 0 in self.sites

    def complement(self) -> "LadderInterval":
        return LadderInterval((self.start + self.ell) % self.n, self.n - self.ell, self.n)

    @classmethod
    def all(cls, n: int, max_ell: int | None = None) -> list["LadderInterval"]:
        max_ell = n if max_ell is None else max_ell
        return [cls(s, ell, n) for ell in range(max_ell + 1) for s in range(n)]


@dataclass
class EntropyReport:
    n: int
    ell: int
    start: int
    wraps: bool
    renyi2: float
    von_neumann: float
    purity: float
    volume_term: float
    clock_factor: float = float("nan")
    spin_factor: float = float("nan")
    spin_purity_max: float = float("nan")
    frobenius_purity: float = float("nan")
    c_ell: float = float("nan")
    c_ell_pauli: float = float("nan")
    purity_bound: float = float("nan")
    criterion: bool | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


# ---------- generic reduced density matrices


def composite_register(state: CompositeState) -> np.ndarray:
    """Composite state as a ``2n``-qubit vector (clock occupations low, spins high)."""
    return composite_to_fock(state).reshape(-1)


def ladder_qubits(interval: LadderInterval, spin: bool = True, clock: bool = True) -> list[int]:
    n = interval.n
    out = []
    if clock:
        out += interval.sites
    if spin:
        out += [n + s for s in interval.sites]
    return out


def composite_rdm(state: CompositeState, interval: LadderInterval) -> np.ndarray:
    qubits = ladder_qubits(interval)
    if len(qubits) > MAX_RDM_QUBITS:
        raise ResourceError(
            f"ladder reduced density matrix on {len(qubits)} qubits (cap {MAX_RDM_QUBITS})",
            16 << (2 * len(qubits)),
            16 << (2 * MAX_RDM_QUBITS),
        )
    return reduced_density(composite_register(state), 2 * state.n, qubits)


def ladder_entropies(state: CompositeState, interval: LadderInterval) -> tuple[float, float]:
    """``(renyi2, vn)`` of a pure composite state, using the smaller side of the cut."""
    if interval.ell == 0 or interval.ell == interval.n:
        return 0.0, 0.0
    side = interval if 2 * interval.ell <= interval.n else interval.complement()
    s2, vn = entropies(composite_rdm(state, side))
    return float(s2), float(vn)


def spin_rdm(psi: np.ndarray, n: int, sites: Sequence[int]) -> np.ndarray:
    return reduced_density(psi, n, list(sites))


def renyi2_of(psi: np.ndarray, n: int, sites: Sequence[int]) -> float:
    rho = spin_rdm(psi, n, sites)
    return float(-np.log(np.real(np.vdot(rho, rho))))


# ---------- trace-norm constants


def c_ell_trace(rho: np.ndarray, n: int) -> float:
    """``2^{n/2} || rho - 1/2^ell ||_tr``: the smallest valid trace-norm constant."""
    dim = rho.shape[0]
    return 2 ** (n / 2) * trace_norm(rho - np.eye(dim) / dim)


def _pauli_mats(ell: int):
    i2 = np.eye(2)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1.0, -1.0]).astype(complex)
    for combo in itertools.product((i2, x, y, z), repeat=ell):
        m = np.ones((1, 1), dtype=complex)
        for p in combo:
            m = np.kron(m, p)
        yield m


def c_ell_pauli(rho: np.ndarray, n: int) -> float:
    """``2^{n/2} max_{P != 1} |Tr(P rho)|`` over Paulis on the subsystem."""
    ell = int(round(math.log2(rho.shape[0])))
    vals = [abs(np.trace(p @ rho)) for p in _pauli_mats(ell)][1:]
    return 2 ** (n / 2) * (max(vals) if vals else 0.0)


def chi_state_report(spec: LfsrSpec, q: int, sites: Sequence[int]) -> dict:
    """Entropies, trace and operator norms and the entropy-deficit bound for one chi state."""
    n = spec.n
    psi = build_chi_state(spec, q).amplitudes
    rho = spin_rdm(psi, n, sites)
    s2, vn = entropies(rho)
    ell = len(sites)
    c_tr = c_ell_trace(rho, n)
    op_dev = float(np.linalg.norm(rho, 2))
    return {
        "q": q,
        "ell": ell,
        "renyi2": s2,
        "von_neumann": vn,
        "deficit": ell * np.log(2) - vn,
        "deficit_bound": 2.0 ** (4 + 2 * ell - n),
        "entropy_bound": entropy_bound(n, ell),
        "c_ell_trace": c_tr,
        "c_ell_pauli": c_ell_pauli(rho, n) if ell <= 5 else float("nan"),
        "c_ell_theory": 2.0 ** (2 + ell),
        "trace_norm_dev": c_tr * 2 ** (-n / 2),
        "op_norm": op_dev,
        "op_norm_bound": 2.0**-ell + c_tr * 2 ** (-n / 2),
    }


# ---------- single-hand purity bookkeeping


def clock_factor(n: int, ell: int) -> float:
    return (ell**2 + (n - ell) ** 2) / n**2


def _evolved_spin_states(circ: Circuit, spin: np.ndarray) -> list[np.ndarray]:
    out = []
    psi = np.asarray(spin, dtype=complex)
    for t in range(circ.n):
        out.append(psi)
        if t < circ.n - 1:
            psi = circ.apply_gate(t, psi)
    return out


def frobenius_purity(circ: Circuit, spin: np.ndarray, interval: LadderInterval) -> float:
    """Purity of a single-hand eigenstate from the two-term Frobenius decomposition.

    ``(1/n^2) sum_{t,t' in A} ||sigma^{tt'}||_F^2 + (1/n^2) ||sum_{t not in A} sigma^{tt}||_F^2``
    with ``sigma^{tt'} = Tr_{not A} U_{t:0}|phi><phi|U_{t':0}^dag``; momentum phases drop out.
    """
    n = circ.n
    sites = interval.sites
    evolved = _evolved_spin_states(circ, spin)
    mats = [
        np.moveaxis(psi.reshape((2,) * n), [n - 1 - s for s in reversed(sites)], range(len(sites))).reshape(
            1 << len(sites), -1
        )
        for psi in evolved
    ]
    inside = set(sites)
    total = 0.0
    for t in sites:
        for tp in sites:
            sig = mats[t] @ mats[tp].conj().T
            total += float(np.real(np.vdot(sig, sig)))
    outside = [t for t in range(n) if t not in inside]
    if outside:
        acc = sum(mats[t] @ mats[t].conj().T for t in outside)
        total += float(np.real(np.vdot(acc, acc)))
    return total / n**2


def clock_eigenstate_entropy(
    circ: Circuit, floquet: FloquetState, k_list: Sequence[float], interval: LadderInterval
) -> EntropyReport:
    """Exact entropies of ``Psi_{k, phi}`` plus the purity factorization terms."""
    n, ell = circ.n, interval.ell
    if len(k_list) == 1:
        state = single_hand_eigenstate(circ, floquet.vector, floquet.phase, k_list[0])
    else:
        state = many_hand_eigenstate(circ, floquet.vector, floquet.phase, k_list)
    rho = composite_rdm(state, interval)
    s2, vn = entropies(rho)
    purity = float(np.exp(-s2))
    rep = EntropyReport(n, ell, interval.start, interval.wraps, s2, vn, purity, ell * np.log(2))
    if len(k_list) == 1:
        cf = clock_factor(n, ell)
        evolved = _evolved_spin_states(circ, floquet.vector)
        rhos = [spin_rdm(p, n, interval.sites) for p in evolved]
        c_tr = max(c_ell_trace(r, n) for r in rhos)
        rep.clock_factor = cf
        rep.spin_factor = purity / cf
        rep.spin_purity_max = max(float(np.real(np.vdot(r, r))) for r in rhos)
        rep.frobenius_purity = frobenius_purity(circ, floquet.vector, interval)
        rep.c_ell = c_tr
        rep.c_ell_pauli = max(c_ell_pauli(r, n) for r in rhos) if ell <= 5 else float("nan")
        rep.purity_bound = cf * (2.0**-ell + c_tr * 2 ** (-ell - n / 2) + c_tr**2 * 2.0**-n)
        rep.criterion = bool(ell * np.log(2) / (n / 2) >= c_tr * 2 ** (-n / 2) + c_tr**2 * 2.0 ** (ell - n))
    return rep


# ---------- free fermions


def slater_correlation_matrix(k_list: Sequence[float], phase: float, ell: int, n: int) -> np.ndarray:
    """``C[t, t'] = <c^dag_t c_t'> = (1/n) sum_j e^{i kappa_j (t' - t)}`` on ``ell`` sites."""
    kappa = np.asarray(k_list, dtype=float) - phase / n
    t = np.arange(ell)
    diff = t[None, :] - t[:, None]
    return np.exp(1j * kappa[None, None, :] * diff[:, :, None]).sum(axis=-1) / n


def slater_renyi2(k_list: Sequence[float], phase: float, ell: int, n: int) -> float:
    if len(k_list) == 0 or ell == 0:
        return 0.0
    lam = np.clip(np.linalg.eigvalsh(slater_correlation_matrix(k_list, phase, ell, n)), 0.0, 1.0)
    return float(-np.sum(np.log(lam**2 + (1 - lam) ** 2)))


def slater_entropy_vn(k_list: Sequence[float], phase: float, ell: int, n: int) -> float:
    if len(k_list) == 0 or ell == 0:
        return 0.0
    lam = np.clip(np.linalg.eigvalsh(slater_correlation_matrix(k_list, phase, ell, n)), 1e-300, 1 - 1e-16)
    h = -(lam * np.log(lam) + (1 - lam) * np.log1p(-lam))
    return float(np.sum(h))


def slater_renyi2_dense(k_list: Sequence[float], phase: float, interval: LadderInterval) -> float:
    """Oracle: Renyi-2 of the Slater state from its dense Fock-space RDM."""
    from .clock import slater_fock_state

    vec = slater_fock_state(k_list, phase, interval.n)
    rho = reduced_density(vec, interval.n, interval.sites)
    return float(-np.log(np.real(np.vdot(rho, rho))))


def number_variance(k_list: Sequence[float], ell: int, n: int) -> float:
    """``(1/n^2) sum_{q in k} sum_{q' not in k} sin^2((q-q') ell/2) / sin^2((q-q')/2)``."""
    idx = sorted({int(round(k * n / (2 * np.pi))) % n for k in k_list})
    M = len(idx)
    if M in (0, n):
        warnings.warn("number variance is identically zero at M = 0 or M = n", stacklevel=2)
        return 0.0
    ks = 2 * np.pi * np.array(idx) / n
    others = 2 * np.pi * np.array([j for j in range(n) if j not in set(idx)]) / n
    d = ks[:, None] - others[None, :]
    return float(np.sum(np.sin(d * ell / 2) ** 2 / np.sin(d / 2) ** 2) / n**2)


def number_variance_from_correlations(k_list: Sequence[float], phase: float, ell: int, n: int) -> float:
    """``Tr C_A - Tr C_A^2`` (oracle for the closed form)."""
    c = slater_correlation_matrix(k_list, phase, ell, n)
    return float(np.real(np.trace(c) - np.trace(c @ c)))


# ---------- many-hand Renyi-2 bound


@dataclass
class ManyHandReport:
    n: int
    M: int
    ell: int
    start: int
    wraps: bool
    renyi2: float
    von_neumann: float
    slater_renyi2: float
    min_spin_renyi2: float
    argmin_config: tuple
    holds: bool
    slack: float

    def to_json(self) -> dict:
        d = asdict(self)
        d["argmin_config"] = list(self.argmin_config)
        return d


def min_spin_renyi2(circ: Circuit, spin: np.ndarray, sites: Sequence[int], max_hands: int):
    """``min_t S2(U_{t:0} phi)`` over all configurations with at most ``max_hands`` hands."""
    best, arg = float("inf"), ()
    for m in range(max_hands + 1):
        for cfg in hand_configs(circ.n, m):
            s2 = renyi2_of(krylov_spin_state(circ, cfg, spin), circ.n, sites)
            if s2 < best:
                best, arg = s2, cfg
    return best, arg


def verify_manyhand_bound(
    circ: Circuit, floquet: FloquetState, k_list: Sequence[float], interval: LadderInterval, tol: float = 1e-10
) -> ManyHandReport:
    n, M = circ.n, len(k_list)
    state = many_hand_eigenstate(circ, floquet.vector, floquet.phase, k_list)
    s2, vn = ladder_entropies(state, interval)
    sl = slater_renyi2(k_list, floquet.phase, interval.ell, n)
    ms, arg = min_spin_renyi2(circ, floquet.vector, interval.sites, M)
    slack = s2 - (sl + ms)
    return ManyHandReport(n, M, interval.ell, interval.start, interval.wraps, s2, vn, sl, ms, arg, slack >= -tol, slack)


# ---------- ground states of LFSR clocks


@dataclass
class GroundStateReport:
    n: int
    M: int
    chi: float
    energy: float
    degeneracy: int
    scar: bool
    diagnostic: str
    window_empty: bool
    rows: list

    def to_json(self) -> dict:
        return asdict(self)


def ranked_labels(circ: Circuit, M: int, tol: float = 1e-10) -> list[tuple[float, list]]:
    """Analytic eigenstate labels ``(floquet, k_indices)`` grouped by energy, lowest first."""
    n = circ.n
    ks = momenta(n)
    flat = []
    for f in floquet_states(circ):
        for combo in itertools.combinations(range(n), M):
            flat.append((many_hand_energy(ks[list(combo)], f.phase, n), f, combo))
    flat.sort(key=lambda x: x[0])
    levels: list[tuple[float, list]] = []
    for e, f, combo in flat:
        if levels and abs(e - levels[-1][0]) <= tol:
            levels[-1][1].append((f, combo))
        else:
            levels.append((e, [(f, combo)]))
    return levels


def ground_labels(circ: Circuit, M: int, tol: float = 1e-10):
    """Lowest energy and all analytic labels attaining it."""
    return ranked_labels(circ, M, tol)[0]


def effective_flux(chi: float, M: int) -> float:
    """``chi - pi (M - 1)`` folded to ``(-pi, pi]``.

    With ``M`` fermionic hands on a ring the Fermi sea favours the twist
    ``phi = pi (M - 1)``, so the scar sectors host the ground state exactly
    when this quantity is within ``pi / (2^n - 1)`` of zero.
    """
    eff = math.remainder(chi - math.pi * (M - 1), 2 * math.pi)
    return eff + 2 * math.pi if eff <= -math.pi else eff


def chain_rows(circ: Circuit, floquet: FloquetState, combo: Sequence[int], max_ell: int | None = None) -> list[dict]:
    """Per-interval terms of ``S_A >= S2_A >= S2_slater + min S2_spin`` and the bound chain."""
    n, M = circ.n, len(combo)
    max_ell = n // 2 if max_ell is None else max_ell
    k_list = list(momenta(n)[list(combo)])
    if M == 1:
        state = single_hand_eigenstate(circ, floquet.vector, floquet.phase, k_list[0])
    else:
        state = many_hand_eigenstate(circ, floquet.vector, floquet.phase, k_list)
    rows = []
    for interval in LadderInterval.all(n, max_ell):
        ell = interval.ell
        s2, vn = ladder_entropies(state, interval)
        sl = slater_renyi2(k_list, floquet.phase, ell, n)
        ms = min_spin_renyi2(circ, floquet.vector, interval.sites, M)[0] if ell else 0.0
        combo_measured = sl + ms - ell * np.log(2)
        applies = combo_measured >= 0
        row = {
            "sector": floquet.label,
            "k": list(combo),
            "start": interval.start,
            "ell": ell,
            "wrap": interval.wraps,
            "vn": float(vn),
            "renyi2": float(s2),
            "slater_renyi2": sl,
            "min_spin_renyi2": float(ms),
            "vn_ge_renyi2": bool(vn >= s2 - 1e-10),
            "manyhand_bound": bool(s2 >= sl + ms - 1e-10),
            "slater_ge_ell2_n2": bool(sl >= ell**2 / n**2 - 1e-12),
            "spin_ge_bound": bool(ms >= ell * np.log(2) - 2.0 ** (4 + 2 * ell - n) - 1e-12),
            "chain_rhs": ell * np.log(2) + ell**2 / n**2 - 2.0 ** (4 + 2 * ell - n),
            "measured_combo": float(combo_measured),
            "volume_law_applies": bool(applies),
            "volume_law": bool(vn >= ell * np.log(2) - 1e-10) if applies else None,
            "spin_excess": float(vn - slater_entropy_vn(k_list, floquet.phase, ell, n)),
        }
        row["pass"] = bool(
            row["vn_ge_renyi2"] and row["manyhand_bound"] and row["slater_ge_ell2_n2"] and row["volume_law"] is not False
        )
        rows.append(row)
    return rows


def scar_diagnostic(labels, chi: float, M: int) -> tuple[bool, str]:
    scar = any(f.label.startswith("scar") for f, _ in labels)
    if scar:
        eff = effective_flux(chi, M)
        return True, (
            f"effective flux {eff + 0.0:.6g} within pi/(2^n-1) of 0: ground state lies in the "
            "|0...0>/|+...+> scar sector"
        )
    return False, f"ground state in sector(s) {sorted({f.label for f, _ in labels})}"


def ground_state_report(spec: LfsrSpec, M: int, chi: float, max_ell: int | None = None) -> GroundStateReport:
    """Term-by-term check of the ground-state entropy chain for an LFSR clock.

    Each row covers one interval and one ground-state label. In the scar
    sector the spin part is a product state; the report says so in
    ``diagnostic`` and the rows then record the deficit.
    """
    n = spec.n
    if not 0 < M < n:
        raise ValueError("need 0 < M < n hands")
    circ = Circuit.from_lfsr(spec, chi)
    energy, labels = ground_labels(circ, M)
    scar, diagnostic = scar_diagnostic(labels, chi, M)
    rows = []
    for f, combo in labels:
        rows += chain_rows(circ, f, combo, max_ell)
    return GroundStateReport(n, M, chi, energy, len(labels), scar, diagnostic, window_empty(n), rows)


def window_empty(n: int) -> bool:
    """True when no ``1 <= ell <= n/2 - 6`` exists."""
    return n // 2 - 6 < 1


def dense_ground_check(spec: LfsrSpec, M: int, chi: float, tol: float = 1e-9) -> dict:
    """Dense oracle: lowest eigenvalues of ``H`` versus the analytic ground labels.

    Returns the dense ground energy and degeneracy, and the largest distance of
    an analytic ground state from the dense ground eigenspace.
    """
    n = spec.n
    circ = Circuit.from_lfsr(spec, chi)
    energy, labels = ground_labels(circ, M)
    evals, evecs = np.linalg.eigh(build_many_hand(circ, M))
    deg = int(np.sum(evals < evals[0] + tol))
    space = evecs[:, :deg]
    worst = 0.0
    for f, combo in labels:
        vec = many_hand_eigenstate(circ, f.vector, f.phase, list(momenta(n)[list(combo)])).vector()
        vec = vec / np.linalg.norm(vec)
        worst = max(worst, float(np.linalg.norm(vec - space @ (space.conj().T @ vec))))
    out = {"dense_energy": float(evals[0]), "analytic_energy": energy, "dense_degeneracy": deg,
           "analytic_degeneracy": len(labels), "max_distance": worst}
    if deg == 1:
        state = CompositeState(n, hand_configs(n, M), space[:, 0].reshape(1 << n, -1))
        out["dense_entropies"] = [
            entropies(composite_rdm(state, iv)) for iv in LadderInterval.all(n, n // 2) if iv.ell
        ]
    return out
