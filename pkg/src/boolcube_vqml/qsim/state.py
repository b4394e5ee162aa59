from __future__ import annotations

import numpy as np

from .circuit import MAX_QUBITS


class QuantumState:
    """Pure (amplitude vector) or mixed (density matrix) state on ``m`` qubits."""

    def __init__(self, m: int, amplitudes=None, density=None, check: bool = True):
        if not 1 <= m <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {m}")
        if (amplitudes is None) == (density is None):
            raise ValueError("give exactly one of amplitudes or density")
        dim = 1 << m
        self.m = m
        self.amplitudes = None
        self._density = None
        if amplitudes is not None:
            psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
            if psi.shape != (dim,):
                raise ValueError(f"expected {dim} amplitudes, got {psi.shape}")
            if check and abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
                raise ValueError("state vector is not normalised")
            self.amplitudes = psi
        else:
            rho = np.asarray(density, dtype=complex)
            if rho.shape != (dim, dim):
                raise ValueError(f"expected {dim}x{dim} density matrix, got {rho.shape}")
            if check:
                if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
                    raise ValueError("density matrix is not Hermitian")
                if abs(np.trace(rho).real - 1.0) > 1e-10:
                    raise ValueError("density matrix does not have unit trace")
                if np.linalg.eigvalsh(rho).min() < -1e-9:
                    raise ValueError("density matrix is not positive semidefinite")
            self._density = rho

    @property
    def is_pure(self) -> bool:
        return self.amplitudes is not None

    def density_matrix(self) -> np.ndarray:
        if self._density is None:
            return np.outer(self.amplitudes, self.amplitudes.conj())
        return self._density

    def purity(self) -> float:
        if self.is_pure:
            return 1.0
        rho = self._density
        return float(np.real(np.trace(rho @ rho)))

    def probabilities(self) -> np.ndarray:
        if self.is_pure:
            return np.abs(self.amplitudes) ** 2
        return np.real(np.diag(self._density)).clip(min=0.0)

    def overlap(self, other: "QuantumState") -> float:
        """Fidelity Tr[rho sigma]; equals |<psi|phi>|^2 for pure states."""
        if other.m != self.m:
            raise ValueError("qubit count mismatch")
        if self.is_pure and other.is_pure:
            return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)
        return float(np.real(np.trace(self.density_matrix() @ other.density_matrix())))

    def bloch(self, qubit: int = 0) -> np.ndarray:
        """Bloch vector (<X>, <Y>, <Z>) of one qubit's reduced state."""
        from .operators import PauliSum, expectation

        out = []
        for p in "XYZ":
            word = ["I"] * self.m
            word[qubit] = p
            out.append(expectation(PauliSum(self.m, [(1.0, "".join(word))]), self))
        return np.array(out)

    def __repr__(self) -> str:
        kind = "pure" if self.is_pure else "mixed"
        return f"QuantumState(m={self.m}, {kind})"


def tensor(*states: QuantumState) -> QuantumState:
    """Tensor product; the first state occupies the lowest qubit indices."""
    if not states:
        raise ValueError("need at least one state")
    m = sum(s.m for s in states)
    if all(s.is_pure for s in states):
        psi = np.ones(1, dtype=complex)
        for s in states:
            psi = np.kron(s.amplitudes, psi)
        return QuantumState(m, amplitudes=psi)
    rho = np.ones((1, 1), dtype=complex)
    for s in states:
        rho = np.kron(s.density_matrix(), rho)
    return QuantumState(m, density=rho)
