"""Data-encoding circuits for Boolean inputs.

Phase embedding: one qubit per bit, ``b_i -> H X^{b_i} |0> = |+> or |->``.

QRAC embedding: the input is cut into triplets ``(b_{3i-2}, b_{3i-1}, b_{3i})``
(zero-padded to a multiple of three) and each triplet is written onto one
qubit whose X, Y and Z Bloch components carry the signs ``(-1)^bit``.

Variable indices in :class:`SubsetSelector` and :class:`Permutation` are
1-based, like the variables ``b_1 .. b_n`` they refer to.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import acos, cos, pi, sin, sqrt
from typing import Sequence

import numpy as np

from .bitfourier import BitVector, fwht
from .qsim import MAX_QUBITS, Circuit, QuantumState, run_circuit

DEFAULT_ALPHA1 = pi / 4
DEFAULT_ALPHA2 = 2 * acos(sqrt(0.5 + 1 / (2 * sqrt(3))))
PHASE = "phase"
QRAC = "qrac"
EMBEDDINGS = (PHASE, QRAC)


@dataclass(frozen=True)
class Triplet:
    bx: int
    by: int
    bz: int

    def __post_init__(self):
        for v in (self.bx, self.by, self.bz):
            if v not in (0, 1):
                raise ValueError("triplet entries must be bits")

    def bit(self, pauli: str) -> int:
        """Entry indexed by a Pauli letter; the identity slot is always 0."""
        return {"I": 0, "X": self.bx, "Y": self.by, "Z": self.bz}[pauli]


@dataclass(frozen=True)
class QracAngles:
    alpha1: float = DEFAULT_ALPHA1
    alpha2: float = DEFAULT_ALPHA2

    def __post_init__(self):
        comps = self.bloch_magnitudes()
        if min(abs(c) for c in comps) < 1e-9:
            raise ValueError(
                f"angles ({self.alpha1}, {self.alpha2}) give a vanishing Bloch component"
            )

    def bloch_magnitudes(self) -> tuple[float, float, float]:
        """Signed X, Y, Z weights for the all-zero triplet."""
        return (
            sin(self.alpha2) * cos(self.alpha1),
            sin(self.alpha2) * sin(self.alpha1),
            cos(self.alpha2),
        )


@dataclass(frozen=True)
class SubsetSelector:
    """Strictly increasing tuple ``w`` of 1-based variable indices."""

    w: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(i) for i in self.w)
        object.__setattr__(self, "w", w)
        if not w:
            raise ValueError("selector must pick at least one variable")
        if w[0] < 1 or any(a >= b for a, b in zip(w, w[1:])):
            raise ValueError(f"selector {w} must be strictly increasing and 1-based")

    @property
    def d(self) -> int:
        return len(self.w)

    @classmethod
    def all(cls, n: int, d: int) -> list["SubsetSelector"]:
        """Every d-subset of [n] in lexicographic order."""
        return [cls(c) for c in itertools.combinations(range(1, n + 1), d)]

    def mask(self, n: int) -> int:
        self._check(n)
        return sum(1 << (i - 1) for i in self.w)

    def _check(self, n: int) -> None:
        if self.w[-1] > n:
            raise ValueError(f"selector index {self.w[-1]} exceeds n={n}")


@dataclass(frozen=True)
class Permutation:
    """Bijection on [n]; ``tau[i-1]`` is the image of ``i``.

    Acting on inputs, position ``i`` of ``permute_bits(tau, b)`` holds
    ``b_{tau(i)}``.
    """

    tau: tuple[int, ...]

    def __post_init__(self):
        tau = tuple(int(i) for i in self.tau)
        object.__setattr__(self, "tau", tau)
        if sorted(tau) != list(range(1, len(tau) + 1)):
            raise ValueError(f"{tau} is not a permutation of 1..{len(tau)}")

    @property
    def n(self) -> int:
        return len(self.tau)

    def __call__(self, i: int) -> int:
        return self.tau[i - 1]

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def all(cls, n: int) -> list["Permutation"]:
        return [cls(p) for p in itertools.permutations(range(1, n + 1))]

    def compose(self, other: "Permutation") -> "Permutation":
        """``self o other``: i -> self(other(i))."""
        if other.n != self.n:
            raise ValueError("permutation size mismatch")
        return Permutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, t in enumerate(self.tau, start=1):
            inv[t - 1] = i
        return Permutation(tuple(inv))


def qubits_for(n: int, embedding: str) -> int:
    if embedding == PHASE:
        return n
    if embedding == QRAC:
        return -(-n // 3)
    raise ValueError(f"unknown embedding {embedding!r}")


def select_bits(w: SubsetSelector, b: BitVector) -> BitVector:
    w._check(b.n)
    return BitVector.from_bits(b.bits[i - 1] for i in w.w)


def embed_bits(w: SubsetSelector, b_sub: BitVector, n: int) -> BitVector:
    """Right inverse of :func:`select_bits`: scatter into [n], zeros elsewhere."""
    w._check(n)
    if b_sub.n != w.d:
        raise ValueError(f"expected {w.d} bits, got {b_sub.n}")
    mask = 0
    for bit, i in zip(b_sub.bits, w.w):
        mask |= bit << (i - 1)
    return BitVector(n, mask)


def permute_bits(tau: Permutation, b: BitVector) -> BitVector:
    if tau.n != b.n:
        raise ValueError(f"permutation on {tau.n} elements, input has {b.n} bits")
    bits = b.bits
    return BitVector.from_bits(bits[tau(i) - 1] for i in range(1, b.n + 1))


def permute_mask(tau: Permutation, mask: int) -> int:
    """Integer-mask version of :func:`permute_bits`."""
    out = 0
    for i, t in enumerate(tau.tau):
        out |= ((mask >> (t - 1)) & 1) << i
    return out


# -- phase embedding --------------------------------------------------------

def phase_circuit(b: BitVector) -> Circuit:
    """H^n X^(b) on n qubits: X on qubit i-1 when b_i = 1, then Hadamards."""
    if b.n > MAX_QUBITS:
        raise ValueError(f"phase embedding needs {b.n} qubits (cap {MAX_QUBITS})")
    c = Circuit(b.n)
    for q, bit in enumerate(b.bits):
        if bit:
            c.x(q)
    for q in range(b.n):
        c.h(q)
    return c


def phase_embed(b: BitVector) -> QuantumState:
    return run_circuit(phase_circuit(b))


def phase_states(n: int) -> np.ndarray:
    """All phase-embedded states as rows: psi_b[k] = 2^{-n/2} (-1)^{b.k}."""
    return fwht(np.eye(1 << n)) / np.sqrt(1 << n) + 0j


# -- QRAC embedding ---------------------------------------------------------

def qrac_triplets(b: BitVector) -> list[Triplet]:
    bits = list(b.bits)
    bits += [0] * (-len(bits) % 3)
    return [Triplet(*bits[i:i + 3]) for i in range(0, len(bits), 3)]


def qrac_angles_for(t: Triplet, a: QracAngles = QracAngles()) -> tuple[float, float]:
    """Rotation angles (phi_Y, phi_Z) with R_Z(phi_Z) R_Y(phi_Y)|0> encoding ``t``."""
    phi_z = (t.bx * (pi - a.alpha1) + (1 - t.bx) * a.alpha1) * (-1) ** t.by
    phi_y = t.bz * (pi - a.alpha2) + (1 - t.bz) * a.alpha2
    return phi_y, phi_z


def qrac_circuit(b: BitVector, a: QracAngles = QracAngles()) -> Circuit:
    triplets = qrac_triplets(b)
    if len(triplets) > MAX_QUBITS:
        raise ValueError(f"QRAC embedding needs {len(triplets)} qubits (cap {MAX_QUBITS})")
    c = Circuit(len(triplets))
    for q, t in enumerate(triplets):
        phi_y, phi_z = qrac_angles_for(t, a)
        c.ry(q, phi_y).rz(q, phi_z)
    return c


def qrac_embed(b: BitVector, a: QracAngles = QracAngles()) -> QuantumState:
    return run_circuit(qrac_circuit(b, a))


def qrac_density(t: Triplet, a: QracAngles = QracAngles()) -> np.ndarray:
    """Closed-form single-qubit state (I + sum_P c_P (-1)^{t_P} P) / 2."""
    from .qsim.circuit import I_MAT, X_MAT, Y_MAT, Z_MAT

    cx, cy, cz = a.bloch_magnitudes()
    return 0.5 * (
        I_MAT
        + cx * (-1) ** t.bx * X_MAT
        + cy * (-1) ** t.by * Y_MAT
        + cz * (-1) ** t.bz * Z_MAT
    )


def embed_circuit(b: BitVector, embedding: str, a: QracAngles = QracAngles()) -> Circuit:
    if embedding == PHASE:
        return phase_circuit(b)
    if embedding == QRAC:
        return qrac_circuit(b, a)
    raise ValueError(f"unknown embedding {embedding!r}")


def embed(b: BitVector, embedding: str, a: QracAngles = QracAngles()) -> QuantumState:
    return run_circuit(embed_circuit(b, embedding, a))


def embedded_states(n: int, embedding: str, inputs: Sequence[BitVector] | None = None) -> np.ndarray:
    """Rows are the embedded statevectors of ``inputs`` (default: whole cube)."""
    if inputs is None:
        inputs = BitVector.all(n)
    return np.array([embed(b, embedding).amplitudes for b in inputs])


# -- repeated embeddings ----------------------------------------------------

def _is_hadamard_layer(c: Circuit) -> bool:
    return len(c) == c.m and sorted(g.qubits[0] for g in c.gates if g.name == "H") == list(range(c.m))


def repeated_phase_embed(
    b: BitVector, partition: Sequence[SubsetSelector], interleave: Sequence[Circuit]
) -> Circuit:
    """prod_j Z^(nu_{w_j}(b)) V_{w_j}, applied with j = 1 first.

    ``interleave[0]`` must be the Hadamard layer; later blocks are fixed
    (non-trainable) circuits on the same m qubits.
    """
    if len(partition) != len(interleave) or not partition:
        raise ValueError("need one interleave block per selector")
    m = interleave[0].m
    if not _is_hadamard_layer(interleave[0]):
        raise ValueError("first interleave block must be H on every qubit")
    c = Circuit(m)
    for w, v in zip(partition, interleave):
        if w.d != m or v.m != m:
            raise ValueError(f"every selector and block must span {m} qubits")
        c = c + v
        for q, bit in enumerate(select_bits(w, b).bits):
            if bit:
                c.z(q)
    return c


def hadamard_layer(m: int) -> Circuit:
    c = Circuit(m)
    for q in range(m):
        c.h(q)
    return c


QRAC_REPEAT_AXIS = (1 / sqrt(3), 1 / sqrt(3), 1 / sqrt(3))


def double_qrac_circuit(t: Triplet, a: QracAngles = QracAngles()) -> Circuit:
    """U_{3,1}(t), then R_n(pi) about (1,1,1)/sqrt(3), then U_{3,1}(t) again."""
    phi_y, phi_z = qrac_angles_for(t, a)
    c = Circuit(1).ry(0, phi_y).rz(0, phi_z)
    c.rn(0, QRAC_REPEAT_AXIS, pi)
    return c.ry(0, phi_y).rz(0, phi_z)


def double_qrac_embed(t: Triplet, a: QracAngles = QracAngles()) -> QuantumState:
    return run_circuit(double_qrac_circuit(t, a))


# -- variational SWAP networks ----------------------------------------------

def swap_pairs(m: int) -> list[tuple[int, int]]:
    """Qubit pairs (i, j), i < j, in lexicographic order (0-based qubits)."""
    return list(itertools.combinations(range(m), 2))


def swap_network_layer(m: int, beta: Sequence[float]) -> Circuit:
    """One exp(-i beta/2 SWAP) per qubit pair, pairs in :func:`swap_pairs` order."""
    pairs = swap_pairs(m)
    if len(beta) != len(pairs):
        raise ValueError(f"need {len(pairs)} angles for {m} qubits, got {len(beta)}")
    c = Circuit(m)
    for (i, j), angle in zip(pairs, beta):
        c.swaprot(i, j, float(angle))
    return c


def find_swap_routing(m: int, subset: Sequence[int]) -> tuple[float, ...] | None:
    """Search beta in {0, pi}^C(m,2) routing 1-based qubits ``subset`` to 1..k.

    Success means: for every computational basis input, the bits that started
    on ``subset`` end up (in some order) on the first k qubits. Checked by
    simulation on all 2^m basis states.
    """
    k = len(subset)
    pairs = swap_pairs(m)
    src = [q - 1 for q in subset]
    for choice in itertools.product((0.0, pi), repeat=len(pairs)):
        if _routes(m, choice, src, k):
            return choice
    return None


def _routes(m: int, beta, src: list[int], k: int) -> bool:
    from .qsim import simulate

    out = simulate(swap_network_layer(m, beta), None, np.eye(1 << m, dtype=complex))
    # beta in {0, pi} makes the layer a qubit permutation (up to phase);
    # read it off single-bit inputs, then confirm it on every basis state
    dest = []
    for q in range(m):
        target = int(np.argmax(np.abs(out[1 << q])))
        if abs(abs(out[1 << q, target]) - 1) > 1e-10 or bin(target).count("1") != 1:
            return False
        dest.append(target.bit_length() - 1)
    for basis in range(1 << m):
        image = sum(((basis >> q) & 1) << dest[q] for q in range(m))
        if abs(abs(out[basis, image]) - 1) > 1e-10:
            return False
    return sorted(dest[s] for s in src) == list(range(k))
