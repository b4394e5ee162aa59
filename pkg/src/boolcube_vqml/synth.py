"""Exact observable synthesis for phase and QRAC embedded models.

Given a Fourier spectrum ``ghat`` this module builds observables ``O`` with
``Tr[O rho(b)] = g(b)`` on the whole cube, ensembles of smaller models whose
outputs sum to ``g``, and the inverse maps that read a model's Fourier
spectrum straight off its observable.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import comb, prod
from typing import Sequence, Union

import numpy as np

from .bitfourier import (
    BitVector,
    FourierSpectrum,
    FunctionTable,
    degree,
    fwht,
    mask_to_string,
    popcount,
)
from .embed import (
    PHASE,
    QRAC,
    Permutation,
    QracAngles,
    SubsetSelector,
    embedded_states,
    permute_mask,
    qubits_for,
)
from .qsim import DenseObservable, PauliSum, batch_expectation, eigh, expectation
from .qsim.operators import PAULI_LETTERS

PHASE_SYNTH_MAX = 12
KQE_MAX_QUBITS = 8
ENSEMBLE_QRAC_MAX_BITS = 7

Observable = Union[DenseObservable, PauliSum]
Preprocessor = Union[SubsetSelector, Permutation]


class SupportError(ValueError):
    """A spectrum has a nonzero coefficient the construction cannot reach."""

    def __init__(self, message: str, mask: str):
        super().__init__(f"{message}: {mask}")
        self.mask = mask


# -- phase embedding -----------------------------------------------------------

def synth_phase_obs(spec: FourierSpectrum) -> DenseObservable:
    """Observable with entries ``O[k, j] = ghat(k xor j)``."""
    n = spec.n
    if n > PHASE_SYNTH_MAX:
        raise ValueError(f"phase synthesis limited to n <= {PHASE_SYNTH_MAX}")
    k = np.arange(1 << n)
    return DenseObservable(n, spec.dense()[k[:, None] ^ k[None, :]] + 0j)


def model_spectrum_phase(o: DenseObservable) -> FourierSpectrum:
    """Fourier spectrum of ``b -> Tr[O rho_PE(b)]``.

    ``fhat(s) = 2^-n * sum_{k xor j = s} O[k, j]``; imaginary parts cancel
    between the (k, j) and (j, k) entries of a Hermitian matrix.
    """
    n = o.m
    k = np.arange(1 << n)
    mat = o.matrix
    coeffs = np.array([mat[k, k ^ s].sum() for s in range(1 << n)]) / (1 << n)
    if np.max(np.abs(coeffs.imag)) > 1e-9:
        raise ValueError("observable is not Hermitian")
    return FourierSpectrum(n, dict(enumerate(coeffs.real)))


# -- QRAC embedding ------------------------------------------------------------

@dataclass(frozen=True)
class KqeSet:
    """Masks over 3m bits with at most one set bit per triplet.

    Ordered like Pauli words in lexicographic order over ``I < X < Y < Z``
    with qubit 0 as the leading character.
    """

    m: int
    masks: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.masks)

    def __contains__(self, mask: int) -> bool:
        return in_kqe(mask, self.m)

    def strings(self) -> list[str]:
        return [mask_to_string(s, 3 * self.m) for s in self.masks]


def in_kqe(mask: int, m: int) -> bool:
    if mask >> (3 * m):
        return False
    return all(popcount((mask >> (3 * i)) & 0b111) <= 1 for i in range(m))


def kqe_set(m: int) -> KqeSet:
    if not 1 <= m <= KQE_MAX_QUBITS:
        raise ValueError(f"m must be in [1, {KQE_MAX_QUBITS}]")
    words = ("".join(w) for w in itertools.product(PAULI_LETTERS, repeat=m))
    return KqeSet(m, tuple(phi_map(w).mask for w in words))


_LETTER_BIT = {"X": 0, "Y": 1, "Z": 2}


def phi_map(word: str) -> BitVector:
    """Pauli word on m qubits -> mask over 3m bits (X, Y, Z mark triplet slots 1, 2, 3)."""
    mask = 0
    for i, ch in enumerate(word):
        if ch == "I":
            continue
        if ch not in _LETTER_BIT:
            raise ValueError(f"bad Pauli letter {ch!r}")
        mask |= 1 << (3 * i + _LETTER_BIT[ch])
    return BitVector(3 * len(word), mask)


def phi_inv(s: BitVector | int, m: int | None = None) -> str:
    if isinstance(s, BitVector):
        mask, width = s.mask, s.n
        if width % 3:
            raise ValueError("mask length must be a multiple of 3")
        m = width // 3 if m is None else m
    else:
        mask = int(s)
        if m is None:
            raise ValueError("m is required for integer masks")
    if not in_kqe(mask, m):
        raise SupportError("mask is outside K^QE", mask_to_string(mask, 3 * m))
    letters = []
    for i in range(m):
        trip = (mask >> (3 * i)) & 0b111
        letters.append({0: "I", 1: "X", 2: "Y", 4: "Z"}[trip])
    return "".join(letters)


def _word_scale(word: str, angles: QracAngles) -> float:
    """Product of Bloch weights over the non-identity slots of ``word``."""
    cx, cy, cz = angles.bloch_magnitudes()
    c = {"X": cx, "Y": cy, "Z": cz}
    return prod(c[ch] for ch in word if ch != "I")


def synth_qrac_permuted(
    spec: FourierSpectrum, tau: Permutation, angles: QracAngles = QracAngles()
) -> tuple[Permutation, PauliSum]:
    """Observable for the model ``b -> Tr[O rho_QE(tau(b))]``.

    Each support mask ``t`` is moved to ``s = tau(t)``, which must land in
    K^QE (one bit per triplet after zero padding); its coefficient then sits
    on the Pauli word ``phi_inv(s)`` with weight ``ghat(t) / prod(c_P)``.
    """
    if tau.n != spec.n:
        raise ValueError(f"permutation acts on {tau.n} bits, spectrum on {spec.n}")
    m = qubits_for(spec.n, QRAC)
    terms = []
    for t, value in spec.items():
        s = permute_mask(tau, t)
        if not in_kqe(s, m):
            raise SupportError(
                "spectrum support is outside the permuted K^QE set",
                mask_to_string(t, spec.n),
            )
        word = phi_inv(s, m)
        terms.append((value / _word_scale(word, angles), word))
    return tau, PauliSum(m, terms)


def synth_qrac_obs(spec: FourierSpectrum, angles: QracAngles = QracAngles()) -> PauliSum:
    """Observable with ``Tr[O rho_QE(b)] = g(b)`` for K^QE-supported spectra.

    The weight on word P is ``3^{|P|/2} ghat(phi(P))`` at the default angles.
    """
    return synth_qrac_permuted(spec, Permutation.identity(spec.n), angles)[1]


def model_spectrum_qrac(
    o: Observable, m: int | None = None, n: int | None = None, angles: QracAngles = QracAngles()
) -> FourierSpectrum:
    """Fourier spectrum of ``b -> Tr[O rho_QE(b)]``.

    ``fhat(phi(P)) = Tr[O P] prod(c_P) / 2^m``, which is
    ``Tr[O P] / (2^m 3^{|P|/2})`` at the default angles. Masks outside K^QE
    get zero. With ``n < 3m`` the padding positions are folded away (they are
    always zero in the input).
    """
    m = o.m if m is None else m
    if o.m != m:
        raise ValueError(f"observable acts on {o.m} qubits, expected {m}")
    n = 3 * m if n is None else n
    if not 3 * m - 2 <= n <= 3 * m:
        raise ValueError(f"{m} QRAC qubits encode 3m-2..3m bits, not {n}")
    pauli = PauliSum.from_dense(o, tol=0.0) if isinstance(o, DenseObservable) else o
    coeffs: dict[int, float] = {}
    keep = (1 << n) - 1
    for weight, word in pauli.terms:
        # Tr[O P] = 2^m * weight for a Pauli sum
        s = phi_map(word).mask & keep
        coeffs[s] = coeffs.get(s, 0.0) + weight * _word_scale(word, angles)
    return FourierSpectrum(n, coeffs)


# -- ensembles -----------------------------------------------------------------

@dataclass
class EnsembleMember:
    preprocessor: Preprocessor
    observable: Observable


@dataclass
class EnsembleModel:
    """Sum of linear quantum models, each fed a preprocessed copy of the input."""

    n: int
    embedding: str
    members: list[EnsembleMember] = field(default_factory=list)

    def __post_init__(self):
        if self.embedding not in (PHASE, QRAC):
            raise ValueError(f"unknown embedding {self.embedding!r}")
        for mem in self.members:
            _check_member(self, mem)

    def __len__(self) -> int:
        return len(self.members)

    def table(self) -> FunctionTable:
        """Ensemble output on every input (vectorised over the cube)."""
        total = np.zeros(1 << self.n)
        cube = range(1 << self.n)
        if self.embedding == QRAC:
            states = embedded_states(self.n, QRAC)
        cache: dict[int, np.ndarray] = {}
        for mem in self.members:
            pre = mem.preprocessor
            if isinstance(pre, Permutation):
                idx = [permute_mask(pre, b) for b in cube]
                d = self.n
            else:
                idx = [_select_mask(pre, b) for b in cube]
                d = pre.d
            if self.embedding == QRAC:
                psis = states[idx]
            else:
                if d not in cache:
                    cache[d] = embedded_states(d, PHASE)
                psis = cache[d][idx]
            total += batch_expectation(mem.observable, psis)
        return FunctionTable(self.n, total)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "n": self.n,
            "embedding": self.embedding,
            "members": [_member_to_dict(mem) for mem in self.members],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc: dict) -> "EnsembleModel":
        return cls(
            int(doc["n"]),
            doc["embedding"],
            [_member_from_dict(d) for d in doc["members"]],
        )

    @classmethod
    def from_json(cls, text: str) -> "EnsembleModel":
        return cls.from_dict(json.loads(text))


def _select_mask(w: SubsetSelector, b: int) -> int:
    return sum(((b >> (i - 1)) & 1) << j for j, i in enumerate(w.w))


def _check_member(e: EnsembleModel, mem: EnsembleMember) -> None:
    pre = mem.preprocessor
    if isinstance(pre, Permutation):
        if pre.n != e.n:
            raise ValueError(f"permutation acts on {pre.n} bits, ensemble on {e.n}")
        bits = e.n
    elif isinstance(pre, SubsetSelector):
        pre._check(e.n)
        bits = pre.d
    else:
        raise TypeError(f"unsupported preprocessor {type(pre).__name__}")
    if mem.observable.m != qubits_for(bits, e.embedding):
        raise ValueError("member observable size does not match its embedded input")


def _member_to_dict(mem: EnsembleMember) -> dict:
    pre = mem.preprocessor
    if isinstance(pre, Permutation):
        out = {"preprocessor": {"kind": "permutation", "tau": list(pre.tau)}}
    else:
        out = {"preprocessor": {"kind": "subset", "w": list(pre.w)}}
    obs = mem.observable
    if isinstance(obs, PauliSum):
        out["pauli_terms"] = [[c, w] for c, w in obs.terms]
    else:
        out["matrix"] = {"real": obs.matrix.real.tolist(), "imag": obs.matrix.imag.tolist()}
    return out


def _member_from_dict(doc: dict) -> EnsembleMember:
    pre = doc["preprocessor"]
    if pre["kind"] == "permutation":
        prep: Preprocessor = Permutation(tuple(pre["tau"]))
    elif pre["kind"] == "subset":
        prep = SubsetSelector(tuple(pre["w"]))
    else:
        raise ValueError(f"unknown preprocessor kind {pre['kind']!r}")
    if "pauli_terms" in doc:
        terms = [(float(c), w) for c, w in doc["pauli_terms"]]
        m = len(terms[0][1]) if terms else _infer_qubits(prep)
        obs: Observable = PauliSum(m, terms)
    else:
        mat = np.array(doc["matrix"]["real"]) + 1j * np.array(doc["matrix"]["imag"])
        obs = DenseObservable(int(np.log2(mat.shape[0])), mat)
    return EnsembleMember(prep, obs)


def _infer_qubits(prep: Preprocessor) -> int:
    return qubits_for(prep.n if isinstance(prep, Permutation) else prep.d, QRAC)


def ensemble_eval(e: EnsembleModel, b: BitVector) -> float:
    """Sum of member expectations, each on its own preprocessed input."""
    from .embed import embed, permute_bits, select_bits

    if b.n != e.n:
        raise ValueError(f"ensemble expects {e.n} bits, got {b.n}")
    total = 0.0
    for mem in e.members:
        pre = mem.preprocessor
        x = permute_bits(pre, b) if isinstance(pre, Permutation) else select_bits(pre, b)
        total += expectation(mem.observable, embed(x, e.embedding))
    return total


def phase_multiplicity(n: int, d: int, weight: int) -> int:
    """Number of d-subsets of [n] containing a fixed set of ``weight`` variables."""
    if weight > d:
        return 0
    return comb(n - weight, d - weight)


def ensemble_phase(spec: FourierSpectrum, d: int) -> EnsembleModel:
    """One d-qubit phase model per d-subset ``w``; outputs sum to ``g``.

    Member ``w`` carries ``ghat(s) / k_s`` for every ``s`` supported inside
    ``w``, where ``k_s`` counts the subsets containing ``supp(s)``. Members
    with an all-zero component are dropped.
    """
    n = spec.n
    if not 1 <= d <= n:
        raise ValueError(f"ensemble width d must be in [1, {n}]")
    if degree(spec) > d:
        raise ValueError(f"spectrum has degree {degree(spec)} > d = {d}")
    members = []
    for w in SubsetSelector.all(n, d):
        wmask = w.mask(n)
        comp = {}
        for s, value in spec.items():
            if s & ~wmask:
                continue
            comp[_select_mask(w, s)] = value / phase_multiplicity(n, d, popcount(s))
        if comp:
            members.append(EnsembleMember(w, synth_phase_obs(FourierSpectrum(d, comp))))
    return EnsembleModel(n, PHASE, members)


def qrac_multiplicity(n: int, s: int, perms: Sequence[Permutation] | None = None) -> int:
    """Number of permutations tau with ``tau(s)`` inside K^QE."""
    m = qubits_for(n, QRAC)
    perms = Permutation.all(n) if perms is None else perms
    return sum(in_kqe(permute_mask(tau, s), m) for tau in perms)


def ensemble_qrac(spec: FourierSpectrum, angles: QracAngles = QracAngles()) -> EnsembleModel:
    """One permuted QRAC model per tau in S_n; outputs sum to ``g``.

    Requires degree <= ceil(n/3). ``k_s`` is counted by enumerating S_n and
    members with an all-zero component are dropped.
    """
    n = spec.n
    m = qubits_for(n, QRAC)
    if n > ENSEMBLE_QRAC_MAX_BITS:
        raise ValueError(f"S_n enumeration limited to n <= {ENSEMBLE_QRAC_MAX_BITS}")
    if degree(spec) > m:
        raise ValueError(f"spectrum has degree {degree(spec)} > ceil(n/3) = {m}")
    perms = Permutation.all(n)
    valid = {s: [in_kqe(permute_mask(tau, s), m) for tau in perms] for s in spec}
    k = {s: sum(flags) for s, flags in valid.items()}
    members = []
    for i, tau in enumerate(perms):
        comp = {s: spec[s] / k[s] for s in spec if valid[s][i]}
        if comp:
            _, obs = synth_qrac_permuted(FourierSpectrum(n, comp), tau, angles)
            members.append(EnsembleMember(tau, obs))
    return EnsembleModel(n, QRAC, members)


def single_model(spec: FourierSpectrum, embedding: str, tau: Permutation | None = None) -> EnsembleModel:
    """Wrap a one-model synthesis as an ensemble with a single member."""
    n = spec.n
    if embedding == PHASE:
        member = EnsembleMember(SubsetSelector(tuple(range(1, n + 1))), synth_phase_obs(spec))
    elif embedding == QRAC:
        tau = Permutation.identity(n) if tau is None else tau
        member = EnsembleMember(*synth_qrac_permuted(spec, tau))
    else:
        raise ValueError(f"unknown embedding {embedding!r}")
    return EnsembleModel(n, embedding, [member])


def find_permutation(spec: FourierSpectrum) -> Permutation | None:
    """First tau in S_n (lexicographic) whose permuted K^QE holds the support."""
    m = qubits_for(spec.n, QRAC)
    for tau in Permutation.all(spec.n):
        if all(in_kqe(permute_mask(tau, s), m) for s in spec):
            return tau
    return None


def diagonalize(o: DenseObservable) -> tuple[PauliSum, np.ndarray]:
    """Split ``O`` into a Z-type observable ``D`` and unitary ``W`` with ``O = W^dag D W``."""
    evals, vecs = eigh(o)
    m = o.m
    zcoeffs = fwht(evals) / (1 << m)
    terms = []
    for z, c in enumerate(zcoeffs):
        if abs(c) > 1e-14:
            terms.append((c, "".join("Z" if (z >> q) & 1 else "I" for q in range(m))))
    return PauliSum(m, terms), vecs.conj().T
