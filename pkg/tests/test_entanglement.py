import math
import warnings

import numpy as np
import pytest

from lfsrclock.chi import build_chi_state, entropy_bound
from lfsrclock.clock import Circuit, floquet_states, many_hand_eigenstate, momenta, single_hand_eigenstate
from lfsrclock.entanglement import (
    LadderInterval,
    c_ell_pauli,
    c_ell_trace,
    chi_state_report,
    clock_eigenstate_entropy,
    composite_rdm,
    dense_ground_check,
    effective_flux,
    frobenius_purity,
    ground_labels,
    ground_state_report,
    ladder_entropies,
    number_variance,
    number_variance_from_correlations,
    slater_entropy_vn,
    slater_renyi2,
    slater_renyi2_dense,
    spin_rdm,
    verify_manyhand_bound,
    window_empty,
)
from lfsrclock.errors import ResourceError
from lfsrclock.lfsr import LfsrSpec
from lfsrclock.states import entropies

C4 = Circuit.from_lfsr(LfsrSpec.default(4))
C6 = Circuit.from_lfsr(LfsrSpec.default(6))


def test_interval_geometry():
    iv = LadderInterval(4, 3, 6)
    assert iv.sites == [4, 5, 0]
    assert iv.wraps and iv.contains_origin
    assert iv.complement().sites == [1, 2, 3]
    assert not LadderInterval(1, 3, 6).wraps
    assert len(LadderInterval.all(6, 3)) == 4 * 6
    with pytest.raises(ValueError):
        LadderInterval(0, 7, 6)


@pytest.mark.parametrize("M", [1, 2])
def test_composite_entropy_complement_symmetry(M):
    f = floquet_states(C4)[6]
    st_ = many_hand_eigenstate(C4, f.vector, f.phase, list(momenta(4)[[0, 1][:M]]))
    for iv in LadderInterval.all(4):
        if iv.ell in (0, 4):
            continue
        a = entropies(composite_rdm(st_, iv))
        b = entropies(composite_rdm(st_, iv.complement()))
        assert np.allclose(a, b, atol=1e-10)
        assert np.allclose(ladder_entropies(st_, iv), a, atol=1e-10)
        assert a[1] >= a[0] - 1e-12


def test_rdm_cap():
    c = Circuit.identity(9)
    f = floquet_states(c)[0]
    st_ = single_hand_eigenstate(c, f.vector, f.phase, 0.0)
    with pytest.raises(ResourceError):
        composite_rdm(st_, LadderInterval(0, 9, 9))


@pytest.mark.parametrize("n", [8, 10])
def test_chi_state_report_bounds(n):
    spec = LfsrSpec.default(n)
    rng = np.random.default_rng(n)
    for q in rng.integers(1, spec.order, 4):
        for ell in (1, 2, 3):
            sites = sorted(rng.choice(n, ell, replace=False).tolist())
            r = chi_state_report(spec, int(q), sites)
            assert r["c_ell_trace"] <= r["c_ell_theory"]
            assert r["c_ell_pauli"] <= r["c_ell_trace"] + 1e-12
            assert r["von_neumann"] >= r["entropy_bound"]
            assert r["deficit"] <= r["deficit_bound"]
            assert r["op_norm"] <= r["op_norm_bound"] + 1e-12
            assert r["von_neumann"] >= r["renyi2"] - 1e-12


def test_pauli_maximum_is_not_the_trace_constant():
    # the largest Pauli expectation underestimates the trace-norm deviation
    spec = LfsrSpec.default(8)
    r = chi_state_report(spec, 11, [0, 1, 2])
    assert r["c_ell_pauli"] < r["c_ell_trace"]


def test_c_ell_of_maximally_mixed_is_zero():
    rho = np.eye(4) / 4
    assert c_ell_trace(rho, 6) == 0
    assert c_ell_pauli(rho, 6) == 0


@pytest.mark.parametrize("iv", [LadderInterval(0, 2, 6), LadderInterval(4, 3, 6), LadderInterval(1, 1, 6)])
def test_frobenius_purity_matches_exact(iv):
    for f in floquet_states(C6)[2::20]:
        rep = clock_eigenstate_entropy(C6, f, [momenta(6)[1]], iv)
        assert abs(rep.frobenius_purity - rep.purity) < 1e-12
        assert rep.purity <= rep.purity_bound + 1e-12
        assert rep.c_ell <= 2.0 ** (2 + iv.ell)
        assert np.isclose(rep.spin_factor * rep.clock_factor, rep.purity)


def test_frobenius_purity_direct_call():
    f = floquet_states(C4)[5]
    iv = LadderInterval(0, 2, 4)
    st_ = single_hand_eigenstate(C4, f.vector, f.phase, momenta(4)[2])
    exact = math.exp(-ladder_entropies(st_, iv)[0])
    assert abs(frobenius_purity(C4, f.vector, iv) - exact) < 1e-12


@pytest.mark.parametrize("n", [4, 6, 8])
def test_slater_renyi2_matches_dense(n):
    ks = momenta(n)
    for combo in ([0], [0, 1], [1, 2, n - 1]):
        for ell in range(1, n):
            iv = LadderInterval(0, ell, n)
            a = slater_renyi2(ks[combo], 0.3, ell, n)
            assert abs(a - slater_renyi2_dense(ks[combo], 0.3, iv)) < 1e-10
            assert slater_entropy_vn(ks[combo], 0.3, ell, n) >= a - 1e-12


@pytest.mark.parametrize("n", [4, 7, 10])
def test_number_variance_closed_form(n):
    ks = momenta(n)
    rng = np.random.default_rng(n)
    for M in range(1, n):
        combo = sorted(rng.choice(n, M, replace=False).tolist())
        for ell in range(1, n):
            v = number_variance(ks[combo], ell, n)
            assert abs(v - number_variance_from_correlations(ks[combo], 0.0, ell, n)) < 1e-10
            assert slater_renyi2(ks[combo], 0.0, ell, n) >= 2 * v - 1e-12


def test_number_variance_empty_or_full_warns():
    with pytest.warns(UserWarning):
        assert number_variance([], 2, 5) == 0.0
    with pytest.warns(UserWarning):
        assert number_variance(momenta(5), 2, 5) == 0.0


@pytest.mark.parametrize("M", [1, 2, 3])
def test_manyhand_bound_n6(M):
    ks = momenta(6)
    for f in floquet_states(C6)[1::17]:
        for iv in (LadderInterval(0, 2, 6), LadderInterval(5, 3, 6)):
            rep = verify_manyhand_bound(C6, f, list(ks[[0, 2, 3][:M]]), iv)
            assert rep.holds, rep


def test_effective_flux():
    assert effective_flux(0.0, 1) == 0.0
    assert abs(effective_flux(math.pi, 2)) < 1e-15
    assert abs(abs(effective_flux(0.0, 2)) - math.pi) < 1e-15
    assert abs(effective_flux(math.pi, 3) - math.pi) < 1e-12


@pytest.mark.parametrize("M,chi,scar", [(1, 0.0, True), (2, math.pi, True), (2, 0.0, False), (3, 0.0, True), (3, math.pi, False)])
def test_scar_sector_detection(M, chi, scar):
    spec = LfsrSpec.default(6)
    _, labels = ground_labels(Circuit.from_lfsr(spec, chi), M)
    assert any(f.label.startswith("scar") for f, _ in labels) == scar
    dense = dense_ground_check(spec, M, chi)
    assert abs(dense["dense_energy"] - dense["analytic_energy"]) < 1e-9
    assert dense["dense_degeneracy"] == dense["analytic_degeneracy"]
    assert dense["max_distance"] < 1e-8


def test_ground_state_report_non_scar():
    rep = ground_state_report(LfsrSpec.default(6), 2, 0.0)
    assert not rep.scar
    assert rep.window_empty
    assert rep.rows and all(r["pass"] for r in rep.rows)


def test_ground_state_report_scar_diagnostic():
    rep = ground_state_report(LfsrSpec.default(6), 2, math.pi)
    assert rep.scar and "scar" in rep.diagnostic


def test_window_empty():
    assert window_empty(12) and window_empty(13)
    assert not window_empty(14)
