import itertools
from math import acos, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolcube_vqml.bitfourier import BitVector, FunctionTable, wht_forward
from boolcube_vqml.embed import (
    DEFAULT_ALPHA2,
    Permutation,
    QracAngles,
    SubsetSelector,
    Triplet,
    double_qrac_embed,
    embed_bits,
    find_swap_routing,
    hadamard_layer,
    permute_bits,
    permute_mask,
    phase_embed,
    phase_states,
    qrac_angles_for,
    qrac_density,
    qrac_embed,
    qrac_triplets,
    repeated_phase_embed,
    select_bits,
    swap_network_layer,
    swap_pairs,
)
from boolcube_vqml.qsim import Circuit, DenseObservable, PauliSum, batch_expectation, expectation, run_circuit, simulate

B = BitVector.from_string
TRIPLETS = [Triplet(*t) for t in itertools.product((0, 1), repeat=3)]


def pauli(word):
    return PauliSum(len(word), [(1.0, word)])


def random_observable(m, rng):
    a = rng.normal(size=(1 << m, 1 << m)) + 1j * rng.normal(size=(1 << m, 1 << m))
    return DenseObservable(m, a + a.conj().T)


# -- phase embedding ---------------------------------------------------------------

def test_phase_embed_examples():
    assert np.allclose(phase_embed(B("000")).amplitudes, np.full(8, 8 ** -0.5))
    assert expectation(pauli("X"), phase_embed(B("1"))) == pytest.approx(-1.0)
    a, b = phase_embed(B("0110")), phase_embed(B("0111"))
    assert abs(a.overlap(b)) < 1e-12


def test_phase_embed_unbiased_and_matches_closed_form():
    n = 4
    rows = phase_states(n)
    for b in BitVector.all(n):
        amp = phase_embed(b).amplitudes
        assert np.allclose(np.abs(amp), 2 ** (-n / 2))
        assert np.allclose(amp, rows[b.mask])


def test_phase_embed_is_z_string_on_plus_states():
    # H^n X^b |0> = Z^b H^n |0>
    for b in BitVector.all(3):
        c = hadamard_layer(3)
        for q, bit in enumerate(b.bits):
            if bit:
                c.z(q)
        assert np.allclose(run_circuit(c).amplitudes, phase_embed(b).amplitudes)


# -- QRAC ---------------------------------------------------------------------------------

@pytest.mark.parametrize("bits,expected", [
    ("101", [(1, 0, 1)]),
    ("1011", [(1, 0, 1), (1, 0, 0)]),
    ("110100", [(1, 1, 0), (1, 0, 0)]),
])
def test_qrac_triplets(bits, expected):
    assert qrac_triplets(B(bits)) == [Triplet(*t) for t in expected]


def test_default_angles():
    a = QracAngles()
    assert a.alpha1 == pytest.approx(pi / 4)
    assert DEFAULT_ALPHA2 == pytest.approx(2 * acos(sqrt(0.5 + 1 / (2 * sqrt(3)))))
    assert np.allclose(a.bloch_magnitudes(), [1 / sqrt(3)] * 3)


def test_qrac_angles_examples():
    phi_y, phi_z = qrac_angles_for(Triplet(0, 0, 0))
    assert phi_z == pytest.approx(pi / 4) and phi_y == pytest.approx(DEFAULT_ALPHA2)
    assert qrac_angles_for(Triplet(1, 0, 0))[1] == pytest.approx(3 * pi / 4)
    assert qrac_angles_for(Triplet(0, 1, 0))[1] == pytest.approx(-pi / 4)


def test_qrac_bloch_vectors():
    assert np.allclose(qrac_embed(B("000")).bloch(0), np.ones(3) / sqrt(3))
    assert np.allclose(qrac_embed(B("111")).bloch(0), -np.ones(3) / sqrt(3))
    for t in TRIPLETS:
        r = qrac_embed(BitVector.from_bits((t.bx, t.by, t.bz))).bloch(0)
        signs = np.array([(-1) ** t.bx, (-1) ** t.by, (-1) ** t.bz])
        assert np.allclose(r, signs / sqrt(3), atol=1e-12)


def test_circuit_reproduces_closed_form_density():
    for t in TRIPLETS:
        state = qrac_embed(BitVector.from_bits((t.bx, t.by, t.bz)))
        assert np.allclose(state.density_matrix(), qrac_density(t), atol=1e-10)


@pytest.mark.parametrize("alpha1,alpha2", [(0.3, 1.1), (2.0, 0.4), (-0.7, 2.5)])
def test_general_angles_match_closed_form(alpha1, alpha2):
    a = QracAngles(alpha1, alpha2)
    for t in TRIPLETS:
        state = qrac_embed(BitVector.from_bits((t.bx, t.by, t.bz)), a)
        assert np.allclose(state.density_matrix(), qrac_density(t, a), atol=1e-10)


def test_degenerate_angles_rejected():
    with pytest.raises(ValueError):
        QracAngles(0.0, 1.0)
    with pytest.raises(ValueError):
        QracAngles(0.5, pi / 2)


def test_qrac_padding_invariance():
    for b in BitVector.all(4):
        padded = BitVector(6, b.mask)
        assert np.allclose(qrac_embed(b).amplitudes, qrac_embed(padded).amplitudes)
        assert qrac_embed(b).m == 2


# -- preprocessors ---------------------------------------------------------------------------

def test_select_bits_examples():
    assert str(select_bits(SubsetSelector((1, 2, 3)), B("101101"))) == "101"
    assert str(select_bits(SubsetSelector((2, 5)), B("010010"))) == "11"
    with pytest.raises(ValueError):
        select_bits(SubsetSelector((1, 4)), B("101"))
    with pytest.raises(ValueError):
        SubsetSelector((2, 1))


def test_embed_then_select_is_identity():
    for n in range(1, 6):
        for d in range(1, min(n, 4) + 1):
            for w in SubsetSelector.all(n, d):
                for b in BitVector.all(d):
                    assert select_bits(w, embed_bits(w, b, n)) == b


def test_permute_bits_examples():
    b = B("10110")
    assert permute_bits(Permutation.identity(5), b) == b
    assert str(permute_bits(Permutation((2, 1)), B("10"))) == "01"
    with pytest.raises(ValueError):
        permute_bits(Permutation((2, 1)), b)
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))


@settings(max_examples=50, deadline=None)
@given(st.permutations(range(1, 7)), st.permutations(range(1, 7)), st.integers(0, 63))
def test_permutation_composition_and_weight(t, s, mask):
    tau, sigma, b = Permutation(tuple(t)), Permutation(tuple(s)), BitVector(6, mask)
    assert permute_bits(sigma, permute_bits(tau, b)) == permute_bits(tau.compose(sigma), b)
    assert permute_bits(tau, b).weight == b.weight
    assert permute_mask(tau, mask) == permute_bits(tau, b).mask
    assert permute_bits(tau.inverse(), permute_bits(tau, b)) == b


# -- repeated embeddings -----------------------------------------------------------------------

def test_repeated_single_step_equals_phase_embed():
    w = SubsetSelector((1, 2, 3))
    for b in BitVector.all(3):
        c = repeated_phase_embed(b, [w], [hadamard_layer(3)])
        assert np.allclose(run_circuit(c).amplitudes, phase_embed(b).amplitudes)


def test_repeated_requires_hadamard_first():
    with pytest.raises(ValueError):
        repeated_phase_embed(B("11"), [SubsetSelector((1, 2))], [Circuit(2)])
    with pytest.raises(ValueError):
        repeated_phase_embed(B("111"), [SubsetSelector((1, 2, 3))], [hadamard_layer(2)])


def _repeated_spectrum(blocks, o):
    partition = [SubsetSelector((1, 2)), SubsetSelector((3, 4))]
    states = np.array([
        run_circuit(repeated_phase_embed(b, partition, blocks)).amplitudes for b in BitVector.all(4)
    ])
    return wht_forward(FunctionTable(4, batch_expectation(o, states)))


def test_repeated_reaches_weight_four(rng):
    mix = Circuit(2).ry(0, 0.9).ry(1, -0.4).cz(0, 1)
    spec = _repeated_spectrum([hadamard_layer(2), mix], random_observable(2, rng))
    assert any(bin(s).count("1") == 4 for s in spec)


def test_repeated_with_identity_block_merges(rng):
    # with V_2 = I the two encodings collapse to Z^(b1+b3) Z^(b2+b4) H^2 |0>
    spec = _repeated_spectrum([hadamard_layer(2), Circuit(2)], random_observable(2, rng))
    allowed = {0b0000, 0b0101, 0b1010, 0b1111}
    assert set(spec) <= allowed


def test_double_qrac():
    states = [double_qrac_embed(t) for t in TRIPLETS]
    for s in states:
        assert s.purity() == pytest.approx(1.0)
    assert abs(states[0].overlap(states[-1])) ** 2 < 1 - 1e-6


def test_double_qrac_spectrum_dense(rng):
    states = [double_qrac_embed(Triplet(*b.bits)) for b in BitVector.all(3)]
    o = random_observable(1, rng)
    spec = wht_forward(FunctionTable(3, [expectation(o, s) for s in states]))
    assert len(spec) == 8


# -- SWAP networks -------------------------------------------------------------------------------

def test_swap_pairs_order():
    assert swap_pairs(3) == [(0, 1), (0, 2), (1, 2)]


def test_swap_layer_examples(rng):
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    assert np.allclose(simulate(swap_network_layer(4, [0.0] * 6), None, psi), psi)
    c = Circuit(2).x(0) + swap_network_layer(2, [pi])
    assert abs(run_circuit(c).amplitudes[2]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        swap_network_layer(3, [0.0])


def test_every_pair_routable_to_first_two_qubits():
    for subset in itertools.combinations(range(1, 5), 2):
        beta = find_swap_routing(4, subset)
        assert beta is not None and set(beta) <= {0.0, pi}
        # confirm on every computational basis state
        out = simulate(swap_network_layer(4, beta), None, np.eye(16, dtype=complex))
        for k in range(16):
            image = int(np.argmax(np.abs(out[k])))
            got = sorted((image >> q) & 1 for q in range(2))
            want = sorted((k >> (i - 1)) & 1 for i in subset)
            assert got == want
