"""Deterministic desk-scale invariant suite behind ``lfsrclock verify all``.

Every check yields one row ``(section, check, n, value, bound, pass)``.
Failures are collected, never raised, so a single run reports all of them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import charsums, chi, clock, entanglement, gf2n, lfsr
from .lfsr import LfsrSpec, PauliLabel
from .runio import write_csv, write_dict_rows

CHECK_COLUMNS = ("section", "check", "n", "value", "bound", "pass")
CHAIN_COLUMNS = (
    "n", "taps", "M", "chi", "sector", "interval_start", "ell", "wrap",
    "renyi2", "vn", "slater_renyi2", "min_spin_renyi2", "bound_rhs", "pass",
)


@dataclass
class CheckLog:
    rows: list = field(default_factory=list)

    def add(self, section: str, check: str, n: int, value: float, bound: float, ok: bool):
        self.rows.append((section, check, int(n), float(value), float(bound), bool(ok)))

    def le(self, section, check, n, value, bound):
        self.add(section, check, n, value, bound, value <= bound)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r[-1]]


def tampered_mask(spec: LfsrSpec) -> LfsrSpec:
    """Deterministically flip tap bits until the spec stops being maximal."""
    for bit in range(1, spec.n):
        cand = LfsrSpec(spec.n, spec.taps ^ (1 << bit))
        if not lfsr.is_maximal(cand):
            return cand
    raise RuntimeError("no non-maximal single-bit tamper found")


def _field_checks(log: CheckLog, n: int):
    for m, taps in sorted(lfsr.PUBLISHED_TAPS.items()):
        if m > max(n, 12):
            continue
        spec = LfsrSpec.published(m)
        log.add("field", f"published_primitive[{m}]", m, float(gf2n.is_primitive(spec.poly)), 1, gf2n.is_primitive(spec.poly))
    printed = LfsrSpec.published(14, corrected=False)
    ok = not gf2n.is_primitive(printed.poly)
    log.add("field", "published_n14_rejected", 14, float(gf2n.x_order(printed.poly)), (1 << 14) - 1, ok)
    for m in range(2, min(n, 8) + 1):
        found = len(gf2n.find_primitive_polys(m))
        log.add("field", f"primitive_count[{m}]", m, found, gf2n.primitive_count(m), found == gf2n.primitive_count(m))
    spec = LfsrSpec.default(n)
    tab = gf2n.build_dlog_table(spec.poly)
    j = np.arange(tab.order)
    err = int(np.count_nonzero(tab.inverse[tab.forward] != j))
    log.add("field", "dlog_roundtrip", n, err, 0, err == 0)


def _lfsr_checks(log: CheckLog, spec: LfsrSpec):
    n = spec.n
    period = len(lfsr.orbit(spec))
    log.add("lfsr", "maximal_period", n, period, spec.order, period == spec.order)
    if n <= 12:
        perm = lfsr.floquet_permutation(spec)
        amat = lfsr.alpha_matrix(spec)
        states = np.arange(1 << n, dtype=np.int64)
        bad = int(np.count_nonzero(perm != lfsr.gf2_apply_array(amat, states)))
        log.add("lfsr", "circuit_equals_alpha", n, bad, 0, bad == 0)
    bad = tampered_mask(spec)
    detected = not lfsr.is_maximal(bad)
    log.add("lfsr", f"negative_control_tamper[{bad.taps:#x}]", n, float(detected), 1, detected)


def _chi_checks(log: CheckLog, spec: LfsrSpec):
    n, order = spec.n, spec.order
    best, over = chi.max_element_all_q(spec, method="numpy")
    log.add("chi", "element_bound_violations", n, over, 0, over == 0)
    log.le("chi", "element_bound_max", n, best, chi.element_bound(n) * (1 + 1e-12))
    z, x = PauliLabel(0, spec.one), PauliLabel(spec.one, 0)
    dz = chi.pauli_matrix_element(spec, 1, 1, z) * order
    log.le("chi", "diag_Z_times_N_plus_1", n, abs(dz + 1), 1e-10)
    oz = abs(chi.pauli_matrix_element(spec, 1, 2, z)) * order / 2 ** (n / 2)
    log.le("chi", "offdiag_absZ_ratio_minus_1", n, abs(oz - 1), 1e-10)
    dx = abs(chi.pauli_matrix_element(spec, 1, 1, x)) * order
    log.le("chi", "diag_absX_times_N_minus_1", n, abs(dx - 1), 1e-10)
    ox = abs(chi.pauli_matrix_element(spec, 1, 2, x)) * order / 2 ** (n / 2)
    log.le("chi", "offdiag_absX_ratio_minus_1", n, abs(ox - 1), 1e-10)
    circ = clock.Circuit.from_lfsr(spec)
    worst = max(
        clock.floquet_residual(circ, f.vector, f.phase) for f in clock.floquet_states(circ)
    )
    log.le("chi", "floquet_residual_max", n, worst, 1e-10)
    sp = chi.mu_spectrum(spec, 1, "offdiagonal")
    log.add("chi", "mu_violations_q1", n, sp.violations, 0, sp.violations == 0)
    worst_gap = -np.inf
    for q in range(1, order):
        for ell in range(1, min(4, n // 2) + 1):
            s2, vn = chi.chi_entropy(spec, q, list(range(ell)))
            worst_gap = max(worst_gap, chi.entropy_bound(n, ell) - vn)
    log.le("chi", "entropy_bound_minus_vn_max", n, worst_gap, 0.0)


def _charsum_checks(log: CheckLog, spec: LfsrSpec, rng: np.random.Generator):
    n, order = spec.n, spec.order
    g = charsums.gauss_sums(spec)
    dev = float(np.max(np.abs(np.abs(g[1:]) - 2 ** (n / 2))))
    log.le("charsum", "gauss_modulus_dev", n, dev, 1e-10)
    worst = 0.0
    for r2 in range(1, min(order, 8)):
        js = charsums.jacobi_sums(spec, r2)
        for r1 in range(1, order):
            if (r1 + r2) % order == 0:
                continue
            worst = max(worst, abs(js[r1] - g[r1] * g[r2] / g[(r1 + r2) % order]))
    log.le("charsum", "jacobi_gauss_identity_dev", n, worst, 1e-10)
    worst = 0.0
    for _ in range(100):
        q, qp = (int(x) for x in rng.integers(1, order, size=2))
        u, v = (int(x) for x in rng.integers(1, 1 << n, size=2))
        a = chi.pauli_matrix_element(spec, q, qp, PauliLabel(u, v)) * order
        b = charsums.mixed_sum(spec, q, qp, u, v)
        worst = max(worst, abs(a - b))
    log.le("charsum", "mixed_sum_oracle_dev", n, worst, 1e-10)
    worst_ratio = 0.0
    for q, qp in [(1, 1), (1, 2), (2, 5)]:
        c = charsums.weil_constant(q, qp).C
        ratio = max(abs(charsums.mixed_sum(spec, q, qp, u, v)) for u in range(1, 1 << n, 7) for v in range(1, 1 << n, 5))
        worst_ratio = max(worst_ratio, ratio / (c * 2 ** (n / 2)))
    log.le("charsum", "weil_bound_ratio", n, worst_ratio, 1.0)


def _clock_checks(log: CheckLog, spec: LfsrSpec, seed: int):
    n = spec.n
    for chi_val in (0.0, 0.37):
        circ = clock.Circuit.from_lfsr(spec, chi_val)
        phases = [f.phase for f in clock.floquet_states(circ)]
        dense = np.linalg.eigvalsh(clock.build_periodic_single(circ))
        dev = float(np.max(np.abs(dense - clock.analytic_single_spectrum(phases, n))))
        log.le("clock", f"single_spectrum_dev[chi={chi_val}]", n, dev, 1e-9)
        if n <= 6:
            for M in (2, 3):
                dense = np.linalg.eigvalsh(clock.build_many_hand(circ, M))
                dev = float(np.max(np.abs(dense - clock.analytic_many_spectrum(phases, n, M))))
                log.le("clock", f"many_spectrum_dev[M={M},chi={chi_val}]", n, dev, 1e-8)
    circ = clock.Circuit.from_lfsr(spec, 0.37)
    fs = clock.floquet_states(circ)
    ks = clock.momenta(n)
    h1 = clock.build_periodic_single(circ)
    worst = 0.0
    for f in fs[:: max(1, len(fs) // 8)]:
        for k in ks:
            st = clock.single_hand_eigenstate(circ, f.vector, f.phase, k)
            worst = max(worst, clock.residual(h1, st.vector(), clock.single_hand_energy(k, f.phase, n)))
    log.le("clock", "single_residual_max", n, worst, 1e-9)
    if n <= 6:
        worst_r, worst_v = 0.0, 0.0
        for M in (2, 3):
            hm = clock.build_many_hand(circ, M)
            for f in (fs[0], fs[3], fs[-1]):
                kl = list(ks[:M])
                st = clock.many_hand_eigenstate(circ, f.vector, f.phase, kl)
                worst_r = max(worst_r, clock.residual(hm, st.vector(), clock.many_hand_energy(kl, f.phase, n)))
                a = clock.composite_to_fock(st).reshape(-1)
                b = clock.v_route_state(circ, f.vector, f.phase, kl).reshape(-1)
                worst_v = max(worst_v, clock.phase_aligned_distance(a, b))
        log.le("clock", "many_residual_max", n, worst_r, 1e-9)
        log.le("clock", "v_route_distance_max", n, worst_v, 1e-9)
    haar = clock.Circuit.haar(min(n, 5), seed, 0.2)
    phases = [f.phase for f in clock.floquet_states(haar)]
    dense = np.linalg.eigvalsh(clock.build_periodic_single(haar))
    dev = float(np.max(np.abs(dense - clock.analytic_single_spectrum(phases, haar.n))))
    log.le("clock", "haar_single_spectrum_dev", haar.n, dev, 1e-9)


def _entropy_checks(log: CheckLog, spec: LfsrSpec, chain_rows: list):
    n = spec.n
    taps = ",".join(map(str, spec.tap_list))
    for m in range(4, max(n, 8) + 1):
        worst = np.inf
        for M in range(1, m):
            for combo in itertools.combinations(range(m), M):
                kl = 2 * np.pi * np.array(combo) / m
                for ell in range(1, m // 2 + 1):
                    worst = min(worst, entanglement.number_variance(kl, ell, m) - ell**2 / (2 * m * m))
        log.add("entropy", "number_variance_minus_bound_min", m, worst, 0.0, worst >= -1e-12)
    if n > 6:
        return
    circ = clock.Circuit.from_lfsr(spec, 0.37)
    fs = clock.floquet_states(circ)
    ks = clock.momenta(n)
    worst = np.inf
    for M in (1, 2, 3):
        for f in (fs[0], fs[5]):
            for combo in [tuple(range(M)), tuple(range(1, 2 * M, 2))]:
                kl = list(ks[list(combo)])
                for iv in entanglement.LadderInterval.all(n):
                    if iv.ell == 0:
                        continue
                    rep = entanglement.verify_manyhand_bound(circ, f, kl, iv)
                    worst = min(worst, rep.slack)
    log.add("entropy", "manyhand_bound_slack_min", n, worst, 0.0, worst >= -1e-10)
    for M, chi_val, expect_scar in [(2, 0.0, False), (3, np.pi, False), (2, np.pi, True), (3, 0.0, True)]:
        rep = entanglement.ground_state_report(spec, M, chi_val)
        log.add("entropy", f"scar_flag[M={M},chi={chi_val:.4f}]", n, float(rep.scar), float(expect_scar), rep.scar == expect_scar)
        if expect_scar:
            excess = max(abs(r["spin_excess"]) for r in rep.rows)
            log.le("entropy", f"scar_spin_excess[M={M},chi={chi_val:.4f}]", n, excess, 1e-9)
        else:
            ok = all(r["pass"] for r in rep.rows)
            log.add("entropy", f"chain_pass[M={M},chi={chi_val:.4f}]", n, float(ok), 1, ok)
        for r in rep.rows:
            chain_rows.append(
                (n, taps, M, chi_val, r["sector"], r["start"], r["ell"], r["wrap"], r["renyi2"], r["vn"],
                 r["slater_renyi2"], r["min_spin_renyi2"], r["chain_rhs"], r["pass"])
            )


SECTIONS = ("field", "lfsr", "chi", "charsum", "clock", "entropy")


def run_verify_all(n: int, seed: int, out_dir: Path, taps=None, sections=SECTIONS) -> dict:
    """Run the suite; write ``verify_checks.csv`` and ``entropy_chain.csv``; return a summary."""
    spec = LfsrSpec.from_taps(n, taps) if taps else LfsrSpec.default(n)
    log = CheckLog()
    chain_rows: list = []
    maximal = lfsr.is_maximal(spec)
    log.add("lfsr", "input_spec_maximal", n, float(maximal), 1, maximal)
    rng = np.random.Generator(np.random.Philox(seed))
    if maximal:
        if "field" in sections:
            _field_checks(log, n)
        if "lfsr" in sections:
            _lfsr_checks(log, spec)
        if "chi" in sections:
            _chi_checks(log, spec)
        if "charsum" in sections:
            _charsum_checks(log, spec, rng)
        if "clock" in sections:
            _clock_checks(log, spec, seed)
        if "entropy" in sections:
            _entropy_checks(log, spec, chain_rows)
    out_dir = Path(out_dir)
    paths = [
        write_csv(out_dir / "verify_checks.csv", CHECK_COLUMNS, log.rows),
        write_csv(out_dir / "entropy_chain.csv", CHAIN_COLUMNS, chain_rows),
    ]
    return {
        "n": n,
        "taps": list(spec.tap_list),
        "seed": seed,
        "checks": len(log.rows),
        "failures": [dict(zip(CHECK_COLUMNS, r)) for r in log.failures],
        "volume_window_empty": entanglement.window_empty(n),
        "note": "maximality failure: remaining sections skipped" if not maximal else "",
        "outputs": [str(p) for p in paths],
    }
