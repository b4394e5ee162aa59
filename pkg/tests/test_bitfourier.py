import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolcube_vqml.bitfourier import (
    BitVector,
    FourierSpectrum,
    FunctionTable,
    degree,
    fwht,
    g3_spectrum,
    g6_spectrum,
    inner_product,
    junta_support,
    mask_to_string,
    parity_chi,
    random_low_degree,
    string_to_mask,
    wht_forward,
    wht_inverse,
)

B = BitVector.from_string


def chi_table(s: BitVector) -> FunctionTable:
    return FunctionTable.from_callable(s.n, lambda b: parity_chi(s, b))


# -- bit vectors ----------------------------------------------------------------

def test_bit_order_b1_is_least_significant():
    b = B("100")
    assert b.mask == 1
    assert b[0] == 1 and b.bits == (1, 0, 0)
    assert str(BitVector(3, 4)) == "001"
    assert string_to_mask("011") == 6 and mask_to_string(6, 3) == "011"


def test_bitvector_validation():
    with pytest.raises(ValueError):
        BitVector(0, 0)
    with pytest.raises(ValueError):
        BitVector(2, 4)
    with pytest.raises(ValueError):
        BitVector(25, 0)
    with pytest.raises(ValueError):
        B("10") ^ B("101")


def test_weight_support_and_xor():
    b = B("1101")
    assert b.weight == 3
    assert b.support() == frozenset({1, 2, 4})
    assert str(b ^ B("0110")) == "1011"


@pytest.mark.parametrize("s,b,expected", [("000", "101", 1), ("110", "101", -1), ("111", "111", -1)])
def test_parity_chi(s, b, expected):
    assert parity_chi(B(s), B(b)) == expected


def test_parity_chi_length_mismatch():
    with pytest.raises(ValueError):
        parity_chi(B("10"), B("100"))


# -- inner products and transforms ------------------------------------------------

def test_inner_product_examples():
    s, t = B("101"), B("011")
    assert inner_product(chi_table(s), chi_table(s)) == pytest.approx(1.0)
    assert inner_product(chi_table(s), chi_table(t)) == pytest.approx(0.0)
    two = FunctionTable(3, np.full(8, 2.0))
    assert inner_product(two, two) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        inner_product(two, FunctionTable(2, np.ones(4)))


def test_orthonormality_exhaustive():
    for n in range(1, 7):
        chis = [chi_table(s) for s in BitVector.all(n)]
        gram = np.array([[inner_product(a, b) for b in chis] for a in chis])
        assert np.array_equal(gram, np.eye(1 << n))


def test_forward_constant_and_character():
    assert dict(wht_forward(FunctionTable(4, np.full(16, 0.7)))) == {0: pytest.approx(0.7)}
    s = B("0110")
    assert dict(wht_forward(chi_table(s))) == {s.mask: pytest.approx(1.0)}


def test_forward_g3_recovers_published_coefficients():
    g3 = FunctionTable.from_callable(
        3, lambda b: 0.5 * (-1) ** b[0] - 0.1 * (-1) ** b[1] + 0.25 * (-1) ** b[2]
    )
    spec = wht_forward(g3)
    assert set(spec) == {string_to_mask(k) for k in ("100", "010", "001")}
    assert spec.coeff("100") == pytest.approx(0.5)
    assert spec.coeff("010") == pytest.approx(-0.1)
    assert spec.coeff("001") == pytest.approx(0.25)
    assert spec.allclose(g3_spectrum(), atol=1e-15)


def test_inverse_examples():
    assert np.allclose(wht_inverse(FourierSpectrum(3, {0: -1.5})).values, -1.5)
    s = B("101")
    assert np.array_equal(wht_inverse(FourierSpectrum(3, {s.mask: 1.0})).values, chi_table(s).values)


def test_inverse_matches_direct_sum_n8(rng):
    n = 8
    spec = FourierSpectrum(n, {int(k): float(v) for k, v in zip(rng.choice(256, 40, replace=False), rng.normal(size=40))})
    direct = np.array([
        sum(c * parity_chi(BitVector(n, s), b) for s, c in spec.items()) for b in BitVector.all(n)
    ])
    table = wht_inverse(spec)
    assert np.max(np.abs(table.values - direct)) <= 1e-12
    assert wht_forward(table).allclose(spec, atol=1e-12)


def test_fwht_is_batched_and_self_inverse_up_to_scale(rng):
    x = rng.normal(size=(5, 32))
    assert np.allclose(fwht(fwht(x)) / 32, x)
    assert np.allclose(fwht(x)[2], fwht(x[2]))
    with pytest.raises(ValueError):
        fwht(np.ones(6))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_roundtrip_and_parseval(n, seed):
    f = FunctionTable(n, np.random.default_rng(seed).normal(size=1 << n))
    spec = wht_forward(f)
    assert np.max(np.abs(wht_inverse(spec).values - f.values)) <= 1e-12
    assert abs(sum(v * v for v in spec.values()) - inner_product(f, f)) <= 1e-10


def test_small_coefficients_dropped():
    spec = FourierSpectrum(2, {"10": 1e-13, "01": 0.5})
    assert list(spec) == [string_to_mask("01")]
    assert spec.coeff("10") == 0.0


# -- degree and juntas ---------------------------------------------------------------

def test_degree_examples():
    assert degree(g3_spectrum()) == 1
    assert degree(g6_spectrum()) == 2
    assert degree(FourierSpectrum(4, {0: 3.0})) == 0
    assert degree(FourierSpectrum(4)) == 0


def test_junta_support_examples():
    assert junta_support(g3_spectrum()) == {1, 2, 3}
    assert junta_support(g6_spectrum()) == {1, 2, 4, 5}
    assert junta_support(FourierSpectrum(3, {0: 1.0})) == frozenset()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.data())
def test_junta_bounds_degree(n, data):
    d = data.draw(st.integers(0, n))
    spec = random_low_degree(n, d, 1, data.draw(st.integers(0, 1000)))
    assert degree(spec) <= len(junta_support(spec))


def test_g6_preset_terms():
    g6 = g6_spectrum()
    assert {mask_to_string(s, 6): v for s, v in g6.items()} == {
        "100100": -0.2, "100010": -0.2, "010100": 0.1, "010010": 0.1,
    }


# -- random generator ----------------------------------------------------------------

def test_random_low_degree_examples():
    const = random_low_degree(3, 0, 1, seed=1)
    assert list(const) == [0] and -1 <= const[0] <= 1
    a, b = random_low_degree(6, 2, 4, seed=7), random_low_degree(6, 2, 4, seed=7)
    assert a == b and len(a) == 4
    assert degree(a) <= 2


def test_random_low_degree_infeasible():
    with pytest.raises(ValueError):
        random_low_degree(3, 1, 5, seed=0)
    with pytest.raises(ValueError):
        random_low_degree(3, 4, 1, seed=0)


# -- CSV -------------------------------------------------------------------------------

def test_csv_roundtrip(rng):
    f = FunctionTable(3, rng.normal(size=8))
    text = f.to_csv()
    assert text.splitlines()[0] == "mask_binary,value"
    assert text.splitlines()[2].startswith("100,")
    assert np.array_equal(FunctionTable.from_csv(text).values, f.values)
    spec = wht_forward(f)
    assert FourierSpectrum.from_csv(spec.to_csv()) == spec


def test_csv_rejects_bad_header():
    with pytest.raises(ValueError):
        FunctionTable.from_csv("mask,val\n0,1\n1,2\n")


def test_table_is_read_only():
    f = FunctionTable(1, [1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0] = 3.0
    with pytest.raises(ValueError):
        FunctionTable(2, [1.0, np.nan, 0.0, 0.0])
