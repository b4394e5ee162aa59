import itertools
from math import pi

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolcube_vqml.qsim import (
    Circuit,
    DenseObservable,
    Param,
    PauliSum,
    QuantumState,
    batch_expectation,
    circuit_unitary,
    eigh,
    expectation,
    jacobi_eigh,
    pauli_to_dense,
    rn_matrix,
    run_circuit,
    rz_matrix,
    ry_matrix,
    sample_expectation,
    simulate,
    swaprot_matrix,
    tensor,
)
from boolcube_vqml.qsim.circuit import CZ_MAT as CZ
from boolcube_vqml.qsim.circuit import H_MAT as H
from boolcube_vqml.qsim.circuit import SWAP_MAT as SWAP
from boolcube_vqml.qsim.circuit import X_MAT as X
from boolcube_vqml.qsim.circuit import Y_MAT as Y
from boolcube_vqml.qsim.circuit import Z_MAT as Z

WORDS = "IXYZ"


def random_state(m, rng):
    v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    return QuantumState(m, amplitudes=v / np.linalg.norm(v))


def random_hermitian(m, rng):
    a = rng.normal(size=(1 << m, 1 << m)) + 1j * rng.normal(size=(1 << m, 1 << m))
    return DenseObservable(m, a + a.conj().T)


def random_circuit(m, gates, rng):
    c = Circuit(m)
    for _ in range(gates):
        kind = rng.integers(7)
        q = int(rng.integers(m))
        other = int((q + 1 + rng.integers(m - 1)) % m) if m > 1 else q
        angle = float(rng.uniform(-pi, pi))
        if kind == 0:
            c.h(q)
        elif kind == 1:
            c.x(q)
        elif kind == 2:
            c.ry(q, angle)
        elif kind == 3:
            c.rz(q, angle)
        elif kind == 4:
            axis = rng.normal(size=3)
            c.rn(q, axis / np.linalg.norm(axis), angle)
        elif kind == 5 and m > 1:
            c.cz(q, other)
        elif m > 1:
            c.swaprot(q, other, angle)
    return c


# -- gates and circuits ----------------------------------------------------------------

def test_gate_matrices_unitary(rng):
    mats = [X, Y, Z, H, CZ, SWAP, ry_matrix(0.3), rz_matrix(-1.1), swaprot_matrix(0.7)]
    axis = rng.normal(size=3)
    mats.append(rn_matrix(axis / np.linalg.norm(axis), 2.2))
    for u in mats:
        assert np.allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-12)


def test_rotation_conventions():
    assert np.allclose(rz_matrix(0.4), np.diag([np.exp(-0.2j), np.exp(0.2j)]))
    assert np.allclose(rn_matrix((0, 0, 1), 0.4), rz_matrix(0.4))
    assert np.allclose(rn_matrix((0, 1, 0), 0.4), ry_matrix(0.4))


def test_run_circuit_examples():
    assert np.allclose(run_circuit(Circuit(1)).amplitudes, [1, 0])
    assert np.allclose(run_circuit(Circuit(1).x(0)).amplitudes, [0, 1])
    psi = run_circuit(Circuit(1).h(0).rz(0, pi))
    assert expectation(PauliSum(1, [(1.0, "X")]), psi) == pytest.approx(-1.0)
    oracle = rz_matrix(pi) @ H @ np.array([1, 0])
    assert abs(np.vdot(oracle, psi.amplitudes)) == pytest.approx(1.0)


def test_qubit_zero_is_least_significant():
    assert np.allclose(run_circuit(Circuit(3).x(0)).amplitudes, np.eye(8)[1])
    assert np.allclose(run_circuit(Circuit(3).x(2)).amplitudes, np.eye(8)[4])


def test_circuit_errors():
    with pytest.raises(ValueError):
        Circuit(2).h(2)
    with pytest.raises(ValueError):
        Circuit(2).cz(1, 1)
    with pytest.raises(ValueError):
        Circuit(1).rn(0, (1, 1, 0), 0.3)
    with pytest.raises(ValueError):
        run_circuit(Circuit(1).ry(0, Param(0)))


def test_symbolic_parameters():
    c = Circuit(1).ry(0, Param(1)).rz(0, Param(0))
    assert c.num_params == 2
    bound = Circuit(1).ry(0, 0.5).rz(0, -0.2)
    assert np.allclose(run_circuit(c, [-0.2, 0.5]).amplitudes, run_circuit(bound).amplitudes)


def test_swaprot_at_pi_is_swap():
    prep = Circuit(2).x(0)  # |10> with b1 on qubit 0
    out = run_circuit(prep + Circuit(2).swaprot(0, 1, pi)).amplitudes
    assert abs(out[2]) == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(run_circuit(prep + Circuit(2).swaprot(0, 1, 0.0)).amplitudes, np.eye(4)[1])


def test_two_qubit_gate_on_non_adjacent_qubits(rng):
    psi = random_state(3, rng).amplitudes
    out = simulate(Circuit(3).swaprot(2, 0, pi), None, psi)
    # exchanging qubits 0 and 2 permutes basis indices b0 b1 b2 -> b2 b1 b0
    perm = [((k & 1) << 2) | (k & 2) | (k >> 2) for k in range(8)]
    expected = np.zeros(8, dtype=complex)
    expected[perm] = psi
    assert abs(abs(np.vdot(expected, out)) - 1) < 1e-10


def test_circuit_unitary_matches_kron(rng):
    c = Circuit(2).ry(0, 0.3).rz(1, 1.2).cz(0, 1)
    u = circuit_unitary(c)
    expected = CZ @ np.kron(rz_matrix(1.2), ry_matrix(0.3))
    assert np.allclose(u, expected)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**31))
def test_norm_preserved_random_circuits(m, seed):
    rng = np.random.default_rng(seed)
    psi = run_circuit(random_circuit(m, 50, rng)).amplitudes
    assert abs(np.linalg.norm(psi) - 1) < 1e-10


def test_batched_simulation_matches_single(rng):
    c = random_circuit(3, 20, rng)
    batch = np.array([random_state(3, rng).amplitudes for _ in range(4)])
    out = simulate(c, None, batch)
    for row, psi in zip(out, batch):
        assert np.allclose(row, simulate(c, None, psi))


# -- states ------------------------------------------------------------------------------

def test_state_validation():
    with pytest.raises(ValueError):
        QuantumState(1, amplitudes=[1, 1])
    with pytest.raises(ValueError):
        QuantumState(1, density=np.array([[1, 0.2], [0.3, 0]]))
    with pytest.raises(ValueError):
        QuantumState(1, density=np.diag([1.5, -0.5]))


def test_purity_and_tensor(rng):
    a, b = random_state(1, rng), random_state(2, rng)
    ab = tensor(a, b)
    assert ab.m == 3
    assert np.allclose(ab.amplitudes, np.kron(b.amplitudes, a.amplitudes))
    assert ab.purity() == pytest.approx(1.0)
    rho = QuantumState(3, density=ab.density_matrix())
    assert rho.purity() == pytest.approx(1.0)


# -- Pauli algebra --------------------------------------------------------------------

def test_pauli_to_dense_examples():
    assert np.allclose(pauli_to_dense(PauliSum(1, [(1.0, "Z")])).matrix, np.diag([1, -1]))
    m = pauli_to_dense(PauliSum(2, [(0.5, "XI"), (0.5, "IX")])).matrix
    assert np.allclose(m, m.T) and abs(np.trace(m)) < 1e-15
    # character i acts on qubit i
    assert np.allclose(pauli_to_dense(PauliSum(2, [(1.0, "XZ")])).matrix, np.kron(Z, X))


def test_pauli_trace_orthogonality():
    for m in range(1, 5):
        words = ["".join(w) for w in itertools.product(WORDS, repeat=m)]
        if m == 4:
            words = words[::7]
        mats = [pauli_to_dense(PauliSum(m, [(1.0, w)])).matrix for w in words]
        for i, p in enumerate(mats):
            for j, q in enumerate(mats):
                assert np.trace(p @ q) == pytest.approx((1 << m) * (i == j))


def test_paulisum_merges_and_decomposes(rng):
    p = PauliSum(2, [(0.5, "XI"), (0.25, "XI"), (1.0, "ZY")])
    assert p.weight("XI") == pytest.approx(0.75) and len(p) == 2
    o = random_hermitian(3, rng)
    assert np.allclose(PauliSum.from_dense(o).to_dense().matrix, o.matrix)
    with pytest.raises(ValueError):
        PauliSum(1, [(1j, "X")])
    with pytest.raises(ValueError):
        PauliSum(2, [(1.0, "X")])


def test_dense_observable_rejects_non_hermitian():
    with pytest.raises(ValueError):
        DenseObservable(1, [[0, 1], [0, 0]])


# -- expectations --------------------------------------------------------------------------

def test_expectation_examples(rng):
    psi = random_state(3, rng)
    assert expectation(PauliSum.identity(3), psi) == pytest.approx(1.0)
    assert expectation(PauliSum(1, [(1.0, "Z")]), run_circuit(Circuit(1).x(0))) == -1.0
    o = random_hermitian(3, rng)
    direct = np.vdot(psi.amplitudes, o.matrix @ psi.amplitudes).real
    assert expectation(o, psi) == pytest.approx(direct, abs=1e-12)
    assert expectation(PauliSum.from_dense(o), psi) == pytest.approx(direct, abs=1e-12)
    mixed = QuantumState(3, density=psi.density_matrix())
    assert expectation(o, mixed) == pytest.approx(direct, abs=1e-12)
    with pytest.raises(ValueError):
        expectation(random_hermitian(2, rng), psi)


def test_batch_expectation(rng):
    psis = np.array([random_state(2, rng).amplitudes for _ in range(5)])
    o = random_hermitian(2, rng)
    zz = PauliSum(2, [(0.3, "ZZ"), (-1.0, "IZ")])
    for row, e1, e2 in zip(psis, batch_expectation(o, psis), batch_expectation(zz, psis)):
        st_ = QuantumState(2, amplitudes=row)
        assert e1 == pytest.approx(expectation(o, st_))
        assert e2 == pytest.approx(expectation(zz, st_))


def test_sample_expectation():
    c = Circuit(1).ry(0, 2 * np.arccos(np.sqrt(0.8)))
    assert sample_expectation(c, None, PauliSum.identity(1), 10, seed=1) == 1.0
    z = PauliSum(1, [(1.0, "Z")])
    a = sample_expectation(c, None, z, 1000, seed=5)
    assert a == sample_expectation(c, None, z, 1000, seed=5)
    exact = expectation(z, run_circuit(c))
    shots = 10**6
    est = sample_expectation(c, None, z, shots, seed=11)
    sigma = np.sqrt((1 - exact**2) / shots)
    assert abs(est - exact) < 3 * sigma
    with pytest.raises(ValueError):
        sample_expectation(c, None, PauliSum(1, [(1.0, "X")]), 10, seed=0)


# -- eigendecomposition -----------------------------------------------------------------

def test_eigh_examples():
    lam, v = eigh(DenseObservable(1, Z))
    assert np.allclose(lam, [-1, 1])
    lam, v = eigh(DenseObservable(1, X))
    assert np.allclose(lam, [-1, 1])
    for col, had in zip(v.T, (H[:, 1], H[:, 0])):
        assert abs(abs(np.vdot(col, had)) - 1) < 1e-12


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_jacobi_reconstruction(m, rng):
    o = random_hermitian(m, rng)
    lam, v = eigh(o)
    assert np.all(np.diff(lam) >= 0)
    assert np.allclose(v.conj().T @ v, np.eye(1 << m), atol=1e-12)
    assert np.linalg.norm(v @ np.diag(lam) @ v.conj().T - o.matrix) < 1e-9
    assert np.allclose(lam, np.linalg.eigvalsh(o.matrix), atol=1e-10)


def test_jacobi_odd_size_and_degenerate(rng):
    a = rng.normal(size=(5, 5))
    a = a + a.T
    lam, v = jacobi_eigh(a)
    assert np.linalg.norm(v @ np.diag(lam) @ v.conj().T - a) < 1e-10
    lam, v = jacobi_eigh(np.eye(4))
    assert np.allclose(lam, 1)
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[0, 1], [2, 0]]))
