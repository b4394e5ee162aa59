"""Hermitian observables: Pauli sums, dense matrices and their expectations.

Pauli words are strings over ``IXYZ``; character ``i`` acts on qubit ``i``.
So ``"XZ"`` is X on qubit 0 tensored with Z on qubit 1, and its dense matrix
is ``kron(Z, X)`` because qubit 0 is the least-significant index.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

from .circuit import MAX_QUBITS, Circuit, simulate
from .state import QuantumState

DENSE_MAX_QUBITS = 12
HERMITIAN_TOL = 1e-10
PAULI_LETTERS = "IXYZ"


def word_masks(word: str) -> tuple[int, int, int]:
    """(x_mask, z_mask, y_count) with P = i**y_count * X**x Z**z."""
    x = z = ny = 0
    for q, ch in enumerate(word):
        if ch == "X":
            x |= 1 << q
        elif ch == "Z":
            z |= 1 << q
        elif ch == "Y":
            x |= 1 << q
            z |= 1 << q
            ny += 1
        elif ch != "I":
            raise ValueError(f"bad Pauli letter {ch!r} in {word!r}")
    return x, z, ny


def _parity(arr: np.ndarray) -> np.ndarray:
    # parity of each integer in arr (non-negative, < 2**32)
    arr = arr.copy()
    out = np.zeros(arr.shape, dtype=np.int64)
    while np.any(arr):
        out ^= arr & 1
        arr >>= 1
    return out


def _pauli_action(word: str, m: int):
    """Columns/phases such that P|k> = phase[k] |k ^ x>."""
    x, z, ny = word_masks(word)
    k = np.arange(1 << m)
    phase = (1j) ** ny * (1 - 2 * _parity(k & z))
    return x, phase


class PauliSum:
    """Real-weighted sum of Pauli words on ``m`` qubits (Hermitian)."""

    def __init__(self, m: int, terms: Iterable[tuple[float, str]] = ()):
        if not 1 <= m <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {m}")
        self.m = m
        merged: dict[str, float] = {}
        for weight, word in terms:
            if len(word) != m:
                raise ValueError(f"word {word!r} does not have length {m}")
            word_masks(word)
            if np.iscomplexobj(weight) and np.imag(weight) != 0:
                raise ValueError("Pauli weights must be real")
            merged[word] = merged.get(word, 0.0) + float(np.real(weight))
        self._terms = {w: c for w, c in merged.items() if c != 0.0}

    @classmethod
    def identity(cls, m: int, weight: float = 1.0) -> "PauliSum":
        return cls(m, [(weight, "I" * m)])

    @classmethod
    def all_z(cls, m: int) -> "PauliSum":
        return cls(m, [(1.0, "Z" * m)])

    @property
    def terms(self) -> list[tuple[float, str]]:
        return [(c, w) for w, c in self._terms.items()]

    def weight(self, word: str) -> float:
        return self._terms.get(word, 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.m != self.m:
            raise ValueError("qubit count mismatch")
        return PauliSum(self.m, self.terms + other.terms)

    def __mul__(self, factor: float) -> "PauliSum":
        return PauliSum(self.m, [(factor * c, w) for c, w in self.terms])

    __rmul__ = __mul__

    def __repr__(self) -> str:
        body = " + ".join(f"{c:.6g}*{w}" for c, w in self.terms) or "0"
        return f"PauliSum(m={self.m}, {body})"

    def is_diagonal(self) -> bool:
        return all(set(w) <= {"I", "Z"} for w in self._terms)

    def diagonal(self) -> np.ndarray:
        """Diagonal of a Z-type sum as a real vector over basis states."""
        if not self.is_diagonal():
            raise ValueError("observable is not diagonal (contains X or Y)")
        k = np.arange(1 << self.m)
        out = np.zeros(1 << self.m)
        for c, w in self.terms:
            _, z, _ = word_masks(w)
            out += c * (1 - 2 * _parity(k & z))
        return out

    def to_dense(self) -> "DenseObservable":
        return pauli_to_dense(self)

    @classmethod
    def from_dense(cls, obs: "DenseObservable", tol: float = 1e-12) -> "PauliSum":
        """Pauli decomposition c_P = Tr[O P] / 2**m, dropping |c_P| <= tol."""
        m = obs.m
        if m > 8:
            raise ValueError("Pauli decomposition limited to 8 qubits")
        mat = obs.matrix
        terms = []
        k = np.arange(1 << m)
        for letters in itertools.product(PAULI_LETTERS, repeat=m):
            word = "".join(letters)
            x, phase = _pauli_action(word, m)
            # Tr[O P] = sum_k O[k, k^x] phase[k]
            c = np.sum(mat[k, k ^ x] * phase) / (1 << m)
            if abs(c.real) > tol:
                terms.append((float(c.real), word))
        return cls(m, terms)


class DenseObservable:
    """Hermitian ``2**m x 2**m`` matrix."""

    def __init__(self, m: int, matrix, check: bool = True):
        if not 1 <= m <= DENSE_MAX_QUBITS:
            raise ValueError(f"dense observables limited to {DENSE_MAX_QUBITS} qubits")
        mat = np.asarray(matrix, dtype=complex)
        if mat.shape != (1 << m, 1 << m):
            raise ValueError(f"expected {1 << m}x{1 << m} matrix, got {mat.shape}")
        if check and np.max(np.abs(mat - mat.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("observable is not Hermitian")
        self.m = m
        self.matrix = mat

    def __repr__(self) -> str:
        return f"DenseObservable(m={self.m})"

    def __add__(self, other: "DenseObservable") -> "DenseObservable":
        return DenseObservable(self.m, self.matrix + other.matrix)

    def conjugate_by(self, unitary: np.ndarray) -> "DenseObservable":
        """Return U^dagger O U."""
        return DenseObservable(self.m, unitary.conj().T @ self.matrix @ unitary)


def pauli_to_dense(p: PauliSum) -> DenseObservable:
    if p.m > DENSE_MAX_QUBITS:
        raise ValueError(f"dense observables limited to {DENSE_MAX_QUBITS} qubits")
    dim = 1 << p.m
    mat = np.zeros((dim, dim), dtype=complex)
    k = np.arange(dim)
    for c, w in p.terms:
        x, phase = _pauli_action(w, p.m)
        mat[k ^ x, k] += c * phase
    return DenseObservable(p.m, mat, check=False)


def _as_operator(o) -> PauliSum | DenseObservable:
    if isinstance(o, (PauliSum, DenseObservable)):
        return o
    raise TypeError(f"expected PauliSum or DenseObservable, got {type(o).__name__}")


def expectation(o: PauliSum | DenseObservable, state: QuantumState) -> float:
    """Tr[O rho] for a pure or mixed state."""
    o = _as_operator(o)
    if o.m != state.m:
        raise ValueError(f"observable acts on {o.m} qubits, state has {state.m}")
    if state.is_pure:
        psi = state.amplitudes
        if isinstance(o, DenseObservable):
            val = np.vdot(psi, o.matrix @ psi)
        else:
            val = 0.0
            for c, w in o.terms:
                x, phase = _pauli_action(w, o.m)
                k = np.arange(psi.size)
                val += c * np.vdot(psi[k ^ x], phase * psi)
    else:
        mat = o.matrix if isinstance(o, DenseObservable) else pauli_to_dense(o).matrix
        val = np.trace(mat @ state.density_matrix())
    if abs(np.imag(val)) > 1e-9:
        raise ValueError(f"expectation has imaginary part {np.imag(val):.3g}")
    return float(np.real(val))


def batch_expectation(o: PauliSum | DenseObservable, psis: np.ndarray) -> np.ndarray:
    """<psi|O|psi> for each row of ``psis`` (shape ``(batch, 2**m)``)."""
    o = _as_operator(o)
    if isinstance(o, PauliSum) and o.is_diagonal():
        return (np.abs(psis) ** 2) @ o.diagonal()
    mat = o.matrix if isinstance(o, DenseObservable) else pauli_to_dense(o).matrix
    return np.real(np.einsum("bi,ij,bj->b", psis.conj(), mat, psis))


def sample_expectation(
    circuit: Circuit,
    bindings: Sequence[float] | None,
    d: PauliSum,
    shots: int,
    seed: int,
    initial: np.ndarray | None = None,
) -> float:
    """Shot-sampled estimate of <D> for a diagonal ``d``.

    Bitstrings are drawn from the output distribution with a counter-based
    (Philox) generator, so a fixed seed reproduces the estimate exactly.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    diag = d.diagonal()
    psi = simulate(circuit, bindings, initial)
    probs = np.abs(psi) ** 2
    probs = probs / probs.sum()
    rng = np.random.Generator(np.random.Philox(seed))
    counts = rng.multinomial(shots, probs)
    return float(counts @ diag / shots)
