import math

import numpy as np
import pytest
import scipy.sparse as sp

from lfsrclock.clock import (
    Circuit,
    analytic_many_spectrum,
    analytic_single_spectrum,
    apply_many_hand,
    apply_propagator,
    build_many_hand,
    build_open_clock,
    build_periodic_single,
    composite_to_fock,
    dressed_current,
    entangler_circuit,
    fit_exponent,
    floquet_residual,
    floquet_states,
    fock_annihilator,
    fock_hamiltonian,
    history_state,
    many_hand_eigenstate,
    many_hand_energy,
    momenta,
    parse_circuit,
    phase_aligned_distance,
    plain_current_fock,
    propagator,
    residual,
    single_hand_eigenstate,
    single_hand_energy,
    slater_current,
    spectral_gap,
    v_route_state,
    zero_energy_fluxes,
)
from lfsrclock.errors import PreconditionError, ResourceError
from lfsrclock.lfsr import LfsrSpec, floquet_permutation

N4 = Circuit.from_lfsr(LfsrSpec.default(4), chi=0.3)
N6 = Circuit.from_lfsr(LfsrSpec.default(6), chi=0.7)


def random_state(dim, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def test_gates_unitary_and_last_identity():
    for circ in (N4, Circuit.haar(5, 3), Circuit.identity(3)):
        assert circ.last_is_identity
        for g in circ.gates:
            assert np.abs(g.conj().T @ g - np.eye(4)).max() < 1e-12


def test_non_unitary_gate_rejected():
    gates = [np.eye(4)] * 3
    gates[1] = 2 * np.eye(4)
    with pytest.raises(ValueError):
        Circuit(3, tuple(gates))


def test_propagator_identities():
    c = Circuit.haar(4, 9, chi=0.4)
    assert np.allclose(propagator(c, 2, 2), np.eye(16))
    assert np.allclose(propagator(c, 4, 0), propagator(c, 4, 2) @ propagator(c, 2, 0))
    assert np.allclose(propagator(c, 1, 3), propagator(c, 3, 1).conj().T)
    psi = random_state(16, 1)
    assert np.allclose(apply_propagator(c, 1, 4, psi), propagator(c, 1, 4) @ psi)


def test_full_period_is_lfsr_permutation_with_flux():
    spec = LfsrSpec.default(5)
    c = Circuit.from_lfsr(spec, chi=1.1)
    perm = floquet_permutation(spec)
    expect = np.zeros((32, 32), dtype=complex)
    expect[perm, np.arange(32)] = np.exp(1.1j)
    assert np.allclose(propagator(c, 5, 0), expect)


def test_open_clock_history_state():
    psi0 = random_state(16, 2)
    h = build_open_clock(N4, psi0)
    evals, vecs = np.linalg.eigh(h)
    assert abs(evals[0]) < 1e-10 and evals[1] > 1e-6
    assert evals[-1] <= 4 + 1e-10
    hist = history_state(N4, psi0)
    assert np.isclose(np.linalg.norm(hist), 1)
    assert np.linalg.norm(h @ hist.reshape(-1)) < 1e-10
    last = vecs[:, 0].reshape(16, 4)[:, 3]
    assert phase_aligned_distance(last / np.linalg.norm(last), propagator(N4, 3, 0) @ psi0) < 1e-9


def test_open_clock_trivial_length():
    psi0 = random_state(16, 3)
    hist = history_state(N4, psi0, T=1)
    assert np.allclose(hist[:, 0], psi0)
    with pytest.raises(PreconditionError):
        build_open_clock(N4, 2 * psi0)


@pytest.mark.parametrize("circ", [N4, Circuit.haar(4, 5, chi=0.2), Circuit.from_lfsr(LfsrSpec.from_taps(4, [2]))], ids=["lfsr", "haar", "nonmax"])
def test_periodic_single_spectrum(circ):
    evals = np.linalg.eigvalsh(build_periodic_single(circ))
    assert evals.min() >= -1e-12 and evals.max() <= 2 + 1e-12
    phases = [f.phase for f in floquet_states(circ)]
    assert len(phases) == 16
    assert np.allclose(evals, analytic_single_spectrum(phases, 4), atol=1e-9)


def test_identity_ring_degeneracy():
    c = Circuit.identity(3)
    evals = np.linalg.eigvalsh(build_periodic_single(c))
    ring = np.sort(np.repeat(1 - np.cos(momenta(3)), 8))
    assert np.allclose(evals, ring)


def test_single_hand_eigenstates_lfsr_n6():
    h = build_periodic_single(N6)
    for f in floquet_states(N6)[::7]:
        for k in momenta(6):
            st_ = single_hand_eigenstate(N6, f.vector, f.phase, k)
            e = single_hand_energy(k, f.phase, 6)
            assert residual(h, st_.vector(), e) < 1e-9
            assert np.isclose(st_.norm(), 1)


def test_floquet_states_are_eigenstates():
    for f in floquet_states(N6):
        assert floquet_residual(N6, f.vector, f.phase) < 1e-10
    with pytest.raises(PreconditionError):
        single_hand_eigenstate(N6, random_state(64, 1), 0.0, 0.0)


def test_flux_cancels_phase():
    f = floquet_states(N6.with_flux(0.0))[5]
    c = N6.with_flux(-f.phase)
    assert abs(np.linalg.eigvalsh(build_periodic_single(c))[0]) < 1e-10
    assert single_hand_energy(0.0, 0.0, 6) == 0


def test_flux_periodicity():
    a = np.linalg.eigvalsh(build_periodic_single(N4))
    b = np.linalg.eigvalsh(build_periodic_single(N4.with_flux(N4.chi + 2 * np.pi)))
    assert np.allclose(a, b, atol=1e-12)


def test_gap_identity_ring():
    g = spectral_gap(Circuit.identity(4))
    assert np.isclose(g.measured, 1 - math.cos(2 * math.pi / 4))
    assert math.isnan(g.predicted)


def test_gap_quadratic_estimate_n6():
    spec = LfsrSpec.default(6)
    c = Circuit.from_lfsr(spec, chi=np.pi / spec.order)
    g = spectral_gap(c)
    assert abs(g.measured - g.predicted) <= 0.2 * g.predicted


def test_zero_energy_flux_count_n4():
    pts = zero_energy_fluxes(Circuit.from_lfsr(LfsrSpec.default(4)))
    assert all(abs(p.ground) < 1e-9 for p in pts)
    assert sum(p.multiplicity for p in pts) == 16
    assert len(pts) == 15  # the two product states share quasienergy zero


def test_fit_exponent():
    ns = [4, 6, 8]
    assert np.isclose(fit_exponent(ns, [4.0 ** -n for n in ns]), np.log(4))


def test_many_hand_m1_equals_single():
    a = np.linalg.eigvalsh(build_many_hand(N4, 1))
    b = np.linalg.eigvalsh(build_periodic_single(N4))
    assert np.allclose(a, b)


def test_many_hand_m0_zero():
    h = build_many_hand(N4, 0)
    assert h.shape == (16, 16) and np.allclose(h, 0)


@pytest.mark.parametrize("M", [2, 3])
def test_many_hand_spectrum_n6(M):
    h = build_many_hand(N6, M)
    evals = np.linalg.eigvalsh(h)
    phases = [f.phase for f in floquet_states(N6)]
    assert np.allclose(evals, analytic_many_spectrum(phases, 6, M), atol=1e-9)
    assert evals.min() >= -1e-10 and evals.max() <= 2 * M + 1e-10


@pytest.mark.parametrize("M", [1, 2, 3])
def test_many_hand_eigenstate_residual(M):
    h = build_many_hand(N6, M)
    ks = momenta(6)
    for f in floquet_states(N6)[::11]:
        for combo in ([0, 1, 5], [2, 3, 4], [1, 2, 3])[: 3]:
            k_list = ks[combo[:M]]
            st_ = many_hand_eigenstate(N6, f.vector, f.phase, k_list)
            e = many_hand_energy(k_list, f.phase, 6)
            assert residual(h, st_.vector(), e) < 1e-9
            assert np.isclose(e, sum(single_hand_energy(k, f.phase, 6) for k in k_list))
            matfree = apply_many_hand(N6, st_)
            assert np.allclose(matfree.vector(), h @ st_.vector())


def test_many_hand_requires_identity_last_gate():
    gates = list(Circuit.haar(4, 2).gates)
    gates[-1] = Circuit.haar(4, 7).gates[0]
    c = Circuit(4, tuple(gates))
    with pytest.raises(PreconditionError):
        build_many_hand(c, 2)
    with pytest.raises(ValueError):
        many_hand_eigenstate(N4, floquet_states(N4)[3].vector, floquet_states(N4)[3].phase, [0.0, 0.0])


def test_fock_hamiltonian_sector_matches():
    h = fock_hamiltonian(N4).toarray()
    full = np.linalg.eigvalsh(h)
    sectors = np.sort(np.concatenate([np.linalg.eigvalsh(build_many_hand(N4, M)) for M in range(5)]))
    assert np.allclose(full, sectors, atol=1e-9)


def test_entangler_conjugation_identities():
    c = Circuit.haar(4, 21, chi=0.4)
    n, dim = 4, 16
    v = entangler_circuit(c)
    cs = [fock_annihilator(n, t) for t in range(n)]
    eye = sp.identity(dim)
    for t in range(n - 1):
        hop = cs[t + 1].T.conj() @ cs[t]
        lhs = v @ sp.kron(eye, hop) @ v.T.conj()
        rhs = sp.kron(sp.csr_matrix(c.gate_unitaries[t]), hop)
        assert abs(lhs - rhs).max() < 1e-10
    # boundary hop: the dressed term maps back to the full period on the spins
    hop = cs[0].T.conj() @ cs[n - 1]
    lhs = v.T.conj() @ sp.kron(sp.csr_matrix(c.gate_unitaries[n - 1]), hop) @ v
    rhs = sp.kron(sp.csr_matrix(propagator(c, n, 0)), hop)
    assert abs(lhs - rhs).max() < 1e-10


@pytest.mark.parametrize("M", [1, 2, 3])
def test_v_route_matches_direct(M):
    c = N4.with_flux(0.0)
    v = entangler_circuit(c)
    ks = momenta(4)
    for f in floquet_states(c)[::5]:
        k_list = ks[[0, 1, 3][:M]]
        direct = composite_to_fock(many_hand_eigenstate(c, f.vector, f.phase, k_list))
        routed = v_route_state(c, f.vector, f.phase, k_list, v)
        assert phase_aligned_distance(routed.reshape(-1), direct.reshape(-1)) < 1e-9


def test_dressed_current():
    c = N4.with_flux(0.0)
    f = floquet_states(c)[4]
    ks = momenta(4)
    v = entangler_circuit(c)
    for k_list in ([ks[1]], [ks[1], ks[0]]):
        st_ = many_hand_eigenstate(c, f.vector, f.phase, k_list)
        cur = dressed_current(c, st_, 1)
        assert np.isclose(cur, slater_current(k_list, f.phase, 4), atol=1e-10)
        rotated = (v.T.conj() @ composite_to_fock(st_).reshape(-1)).reshape(16, 16)
        assert np.isclose(cur, plain_current_fock(rotated, 4, 1), atol=1e-10)
    plus = many_hand_eigenstate(c, f.vector, f.phase, [ks[1]])
    minus = many_hand_eigenstate(c, f.vector, f.phase, [ks[3]])
    # opposite momenta give opposite currents up to the flux shift
    assert dressed_current(c, plus, 0) * dressed_current(c, minus, 0) < 0
    empty = many_hand_eigenstate(c, f.vector, f.phase, [])
    assert dressed_current(c, empty, 0) == 0.0


def test_circuit_parsing_and_json():
    c = parse_circuit("lfsr:5:2", chi=0.25)
    assert c.lfsr == LfsrSpec.from_taps(5, [2])
    assert Circuit.from_json(c.to_json()).label == c.label
    h = Circuit.haar(3, 4)
    assert all(np.allclose(a, b) for a, b in zip(Circuit.from_json(h.to_json()).gates, h.gates))
    custom = Circuit(3, h.gates, 0.5)
    back = Circuit.from_json(custom.to_json())
    assert back.chi == 0.5 and all(np.allclose(a, b) for a, b in zip(back.gates, h.gates))
    with pytest.raises(ValueError):
        parse_circuit("bogus:3")


def test_non_maximal_lfsr_uses_numerical_basis():
    c = Circuit.from_lfsr(LfsrSpec.from_taps(6, [2, 3]))
    assert c.lfsr is None
    assert all(f.label.startswith("schur") for f in floquet_states(c))


def test_dense_cap():
    with pytest.raises(ResourceError):
        build_many_hand(Circuit.identity(12), 6)


def test_krylov_block_diagonal():
    from lfsrclock.clock import hand_configs, krylov_spin_state

    c = Circuit.from_lfsr(LfsrSpec.default(4), chi=0.0)
    M = 2
    configs = hand_configs(4, M)
    h = build_many_hand(c, M)
    fs = floquet_states(c)
    basis = {}
    for f in fs:
        for i, cfg in enumerate(configs):
            vec = np.zeros((16, len(configs)), dtype=complex)
            vec[:, i] = krylov_spin_state(c, cfg, f.vector)
            basis[(f.label, i)] = (f.phase, vec.reshape(-1))
    keys = list(basis)
    worst = 0.0
    for a in keys:
        for b in keys:
            pa, va = basis[a]
            pb, vb = basis[b]
            if abs(np.exp(1j * pa) - np.exp(1j * pb)) > 1e-9:
                worst = max(worst, abs(np.vdot(va, h @ vb)))
    assert worst < 1e-10
