"""Gate-list circuits and a dense, batched statevector simulator.

Qubit ``q`` is bit ``q`` of the computational-basis index (qubit 0 is least
significant), matching the ``b_1 <-> bit 0`` convention of :mod:`bitfourier`.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin, sqrt
from typing import Sequence, Union

import numpy as np

MAX_QUBITS = 14

_SQ2 = 1 / sqrt(2)
X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
Y_MAT = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z_MAT = np.array([[1, 0], [0, -1]], dtype=complex)
H_MAT = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
I_MAT = np.eye(2, dtype=complex)
SWAP_MAT = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


@dataclass(frozen=True)
class Param:
    """Symbolic angle slot; resolved from ``bindings[index]`` at run time."""

    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("parameter index must be non-negative")


Angle = Union[float, Param]


def ry_matrix(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rn_matrix(axis: Sequence[float], theta: float) -> np.ndarray:
    """exp(-i theta/2 (n1 X + n2 Y + n3 Z)) for a unit vector ``axis``."""
    n1, n2, n3 = axis
    gen = n1 * X_MAT + n2 * Y_MAT + n3 * Z_MAT
    return cos(theta / 2) * I_MAT - 1j * sin(theta / 2) * gen


def swaprot_matrix(beta: float) -> np.ndarray:
    """exp(-i beta/2 SWAP); SWAP squares to the identity."""
    return cos(beta / 2) * np.eye(4, dtype=complex) - 1j * sin(beta / 2) * SWAP_MAT


CZ_MAT = np.diag([1, 1, 1, -1]).astype(complex)

_ONE_QUBIT_FIXED = {"X": X_MAT, "Z": Z_MAT, "H": H_MAT}
_ONE_QUBIT_PARAM = {"RY", "RZ", "RN"}
_TWO_QUBIT = {"CZ", "SWAPROT"}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    angle: Angle | None = None
    axis: tuple[float, float, float] | None = None

    def resolve(self, bindings: Sequence[float] | None) -> float | None:
        if not isinstance(self.angle, Param):
            return self.angle
        if bindings is None or self.angle.index >= len(bindings):
            raise ValueError(f"unbound parameter slot {self.angle.index} in {self.name}")
        return float(bindings[self.angle.index])

    def matrix(self, bindings: Sequence[float] | None = None) -> np.ndarray:
        """Dense matrix; two-qubit gates use basis index 2*bit(q0) + bit(q1)."""
        if self.name in _ONE_QUBIT_FIXED:
            return _ONE_QUBIT_FIXED[self.name]
        theta = self.resolve(bindings)
        if self.name == "RY":
            return ry_matrix(theta)
        if self.name == "RZ":
            return rz_matrix(theta)
        if self.name == "RN":
            return rn_matrix(self.axis, theta)
        if self.name == "CZ":
            return CZ_MAT
        if self.name == "SWAPROT":
            return swaprot_matrix(theta)
        raise ValueError(f"unknown gate {self.name}")


class Circuit:
    """Ordered gate list on ``m`` qubits.

    Builder methods append and return ``self`` so circuits can be written as
    chains: ``Circuit(2).h(0).cz(0, 1)``. Treat a finished circuit as
    read-only; combine with ``+``.
    """

    def __init__(self, m: int, gates: Sequence[Gate] = ()):
        if not 1 <= m <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {m}")
        self.m = m
        self._gates: list[Gate] = []
        for g in gates:
            self._append(g)

    @property
    def gates(self) -> tuple[Gate, ...]:
        return tuple(self._gates)

    def __len__(self) -> int:
        return len(self._gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.m != self.m:
            raise ValueError("cannot concatenate circuits on different qubit counts")
        return Circuit(self.m, self._gates + other._gates)

    def __repr__(self) -> str:
        return f"Circuit(m={self.m}, gates={len(self._gates)})"

    @property
    def num_params(self) -> int:
        slots = [g.angle.index for g in self._gates if isinstance(g.angle, Param)]
        return max(slots) + 1 if slots else 0

    def _append(self, gate: Gate) -> "Circuit":
        for q in gate.qubits:
            if not 0 <= q < self.m:
                raise ValueError(f"qubit {q} out of range for {self.m} qubits")
        expected = 2 if gate.name in _TWO_QUBIT else 1
        if len(gate.qubits) != expected:
            raise ValueError(f"{gate.name} acts on {expected} qubit(s)")
        if expected == 2 and gate.qubits[0] == gate.qubits[1]:
            raise ValueError(f"{gate.name} needs two distinct qubits")
        if gate.name not in _ONE_QUBIT_FIXED and gate.name not in _ONE_QUBIT_PARAM | _TWO_QUBIT:
            raise ValueError(f"unknown gate {gate.name}")
        if gate.name == "RN":
            if gate.axis is None or len(gate.axis) != 3:
                raise ValueError("RN needs a 3-component axis")
            if abs(float(np.linalg.norm(gate.axis)) - 1.0) > 1e-12:
                raise ValueError("RN axis must be a unit vector")
        if (gate.name in _ONE_QUBIT_PARAM or gate.name == "SWAPROT") and gate.angle is None:
            raise ValueError(f"{gate.name} needs an angle")
        self._gates.append(gate)
        return self

    def x(self, q: int) -> "Circuit":
        return self._append(Gate("X", (q,)))

    def z(self, q: int) -> "Circuit":
        return self._append(Gate("Z", (q,)))

    def h(self, q: int) -> "Circuit":
        return self._append(Gate("H", (q,)))

    def ry(self, q: int, theta: Angle) -> "Circuit":
        return self._append(Gate("RY", (q,), theta))

    def rz(self, q: int, theta: Angle) -> "Circuit":
        return self._append(Gate("RZ", (q,), theta))

    def rn(self, q: int, axis: Sequence[float], theta: Angle) -> "Circuit":
        return self._append(Gate("RN", (q,), theta, tuple(float(a) for a in axis)))

    def cz(self, q1: int, q2: int) -> "Circuit":
        return self._append(Gate("CZ", (q1, q2)))

    def swaprot(self, q1: int, q2: int, beta: Angle) -> "Circuit":
        return self._append(Gate("SWAPROT", (q1, q2), beta))


def _cz_signs(m: int, q1: int, q2: int) -> np.ndarray:
    k = np.arange(1 << m)
    both = ((k >> q1) & 1) & ((k >> q2) & 1)
    return 1.0 - 2.0 * both


def apply_gate(psi: np.ndarray, gate: Gate, m: int, bindings=None) -> np.ndarray:
    """Apply ``gate`` to a batch of statevectors with shape ``(batch, 2**m)``."""
    batch = psi.shape[0]
    if gate.name == "CZ":
        return psi * _cz_signs(m, *gate.qubits)
    mat = gate.matrix(bindings)
    if len(gate.qubits) == 1:
        q = gate.qubits[0]
        v = psi.reshape(batch, 1 << (m - q - 1), 2, 1 << q)
        return np.einsum("ij,bajc->baic", mat, v).reshape(batch, -1)
    q0, q1 = gate.qubits
    t = psi.reshape((batch,) + (2,) * m)
    # qubit q is tensor axis m - q (axis 0 is the batch)
    a0, a1 = m - q0, m - q1
    t = np.moveaxis(t, (a0, a1), (-2, -1))
    shape = t.shape
    t = t.reshape(shape[:-2] + (4,)) @ mat.T
    t = np.moveaxis(t.reshape(shape), (-2, -1), (a0, a1))
    return t.reshape(batch, -1)


def simulate(circuit: Circuit, bindings=None, initial: np.ndarray | None = None) -> np.ndarray:
    """Run ``circuit`` on a batch of input states (default ``|0...0>``).

    ``initial`` may be a single vector or an array of shape ``(batch, 2**m)``;
    the output has the same shape.
    """
    dim = 1 << circuit.m
    if initial is None:
        initial = np.zeros(dim, dtype=complex)
        initial[0] = 1.0
    psi = np.asarray(initial, dtype=complex)
    single = psi.ndim == 1
    psi = np.atleast_2d(psi)
    if psi.shape[1] != dim:
        raise ValueError(f"state dimension {psi.shape[1]} != {dim}")
    for gate in circuit.gates:
        psi = apply_gate(psi, gate, circuit.m, bindings)
    return psi[0] if single else psi


def circuit_unitary(circuit: Circuit, bindings=None) -> np.ndarray:
    """Dense unitary of ``circuit`` (columns are images of basis states)."""
    dim = 1 << circuit.m
    return simulate(circuit, bindings, np.eye(dim, dtype=complex)).T


def run_circuit(circuit: Circuit, bindings=None):
    """Apply ``circuit`` to ``|0...0>`` and return the pure output state."""
    from .state import QuantumState

    if circuit.num_params and bindings is None:
        raise ValueError("circuit has unbound parameters")
    if bindings is not None and len(bindings) < circuit.num_params:
        raise ValueError(
            f"circuit needs {circuit.num_params} parameters, got {len(bindings)}"
        )
    return QuantumState(circuit.m, amplitudes=simulate(circuit, bindings))
