import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lfsrclock.gf2n import (
    DlogTable,
    PrimitivePoly,
    build_dlog_table,
    euler_phi,
    find_primitive_polys,
    gf_inv,
    gf_inv_array,
    gf_mul,
    gf_mul_array,
    gf_pow,
    gf_pow_array,
    is_primitive,
    primitive_count,
    x_order,
)

P4 = PrimitivePoly.from_taps(4, [1])  # x^4 + x + 1
P8 = PrimitivePoly.from_taps(8, [2, 3, 4])


def poly_mulmod(a, b, mod):
    """Independent oracle: full carry-less product, then long division."""
    prod = 0
    for i in range(b.bit_length()):
        if b >> i & 1:
            prod ^= a << i
    deg = mod.bit_length() - 1
    while prod.bit_length() - 1 >= deg:
        prod ^= mod << (prod.bit_length() - 1 - deg)
    return prod


def test_identity_and_zero():
    for a in range(16):
        assert gf_mul(a, 1, P4) == a
        assert gf_mul(a, 0, P4) == 0


def test_x_cubed_times_x():
    assert gf_mul(0b1000, 0b0010, P4) == 0b0011


def test_inverse_small_field():
    p2 = PrimitivePoly.from_taps(2, [1])
    assert gf_inv(1, p2) == 1
    assert gf_inv(0b10, p2) == 0b11


def test_inverse_exhaustive_n8():
    a = np.arange(1, 256)
    inv = gf_inv_array(a, P8)
    assert np.all(gf_mul_array(a, inv, P8) == 1)
    assert len(set(inv.tolist())) == 255


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        gf_inv(0, P4)


def test_element_range_checked():
    with pytest.raises(ValueError):
        gf_mul(16, 1, P4)


@pytest.mark.parametrize("p", [P4, PrimitivePoly.from_taps(4, [3]), P8], ids=str)
def test_field_axioms_exhaustive(p):
    n = p.degree
    a = np.arange(1 << n)
    A, B = np.meshgrid(a, a, indexing="ij")
    prod = gf_mul_array(A, B, p)
    assert np.array_equal(prod, prod.T)
    for x, y in [(3, 7), (5, 1 << (n - 1)), ((1 << n) - 1, 2)]:
        lhs = gf_mul_array(prod[:, x], y, p)
        rhs = gf_mul_array(a, gf_mul(x, y, p), p)
        assert np.array_equal(lhs, rhs)
        dist = gf_mul_array(a, x ^ y, p)
        assert np.array_equal(dist, prod[:, x] ^ prod[:, y])


def test_mul_matches_long_division_oracle():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a, b = (int(v) for v in rng.integers(0, 256, 2))
        assert gf_mul(a, b, P8) == poly_mulmod(a, b, P8.coeff_mask)


@pytest.mark.parametrize("n", range(2, 11))
def test_lagrange_exhaustive(n):
    p = find_primitive_polys(n)[0]
    a = np.arange(1, 1 << n)
    assert np.all(gf_pow_array(a, (1 << n) - 1, p) == 1)


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
@settings(max_examples=200, deadline=None)
def test_associativity_property(a, b, c):
    assert gf_mul(gf_mul(a, b, P8), c, P8) == gf_mul(a, gf_mul(b, c, P8), P8)


@given(st.integers(1, 255), st.integers(0, 600))
@settings(max_examples=100, deadline=None)
def test_pow_matches_repeated_multiplication(a, e):
    expect = 1
    for _ in range(e % 255):
        expect = gf_mul(expect, a, P8)
    assert gf_pow(a, e, P8) == expect


def test_is_primitive_examples():
    assert is_primitive(0b10011, 4)
    assert not is_primitive(0b11111, 4)
    assert x_order(PrimitivePoly(4, 0b11111)) == 5
    assert is_primitive(0b111, 2)


def test_is_primitive_degree_mismatch():
    with pytest.raises(ValueError):
        is_primitive(0b10011, 5)


def test_find_small_degrees():
    assert len(find_primitive_polys(4)) == 2
    polys2 = find_primitive_polys(2)
    assert [p.coeff_mask for p in polys2] == [0b111]


def test_find_includes_degree9_trinomial():
    masks = {p.coeff_mask for p in find_primitive_polys(9)}
    assert PrimitivePoly.from_taps(9, [4]).coeff_mask in masks


@pytest.mark.parametrize("n", range(2, 13))
def test_primitive_count_matches_totient(n):
    assert len(find_primitive_polys(n)) == euler_phi((1 << n) - 1) // n == primitive_count(n)


def test_fixed_low_coefficients_filter():
    full = find_primitive_polys(8)
    fixed = find_primitive_polys(8, fixed_low_coeffs=[0, 1])
    expect = [p for p in full if p.coeff_mask >> 1 & 1 == 0 and p.coeff_mask >> 2 & 1 == 1]
    assert fixed == expect


def test_dlog_table_properties():
    t = build_dlog_table(P4)
    assert t.one == 1
    assert t.order == 15
    assert sorted(t.forward.tolist()) == list(range(1, 16))
    assert t.inverse[0] == -1


def test_dlog_rejects_non_primitive():
    with pytest.raises(ValueError):
        build_dlog_table(PrimitivePoly(4, 0b11111))


def test_dlog_homomorphism_exhaustive_n8():
    t = build_dlog_table(P8)
    a = np.arange(1, 256)
    A, B = np.meshgrid(a, a, indexing="ij")
    lhs = t.inverse[gf_mul_array(A, B, P8)]
    rhs = (t.inverse[A] + t.inverse[B]) % 255
    assert np.array_equal(lhs, rhs)
    assert np.array_equal(t.mul(A, B), gf_mul_array(A, B, P8))
    assert np.array_equal(t.inv(a), gf_inv_array(a, P8))


def test_dlog_from_forward_rejects_duplicates():
    with pytest.raises(ValueError):
        DlogTable.from_forward(2, np.array([1, 1, 2]))


def test_poly_json_round_trip():
    assert PrimitivePoly.from_json(P8.to_json()) == P8
    assert str(P4) == "x^4 + x + 1"
