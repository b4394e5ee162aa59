"""Property suites behind ``boolcube-vqml verify``.

Each suite draws seeded random instances, checks one construction against
brute-force simulation and returns a :class:`SuiteResult`. On failure the
first counterexample is kept for the report.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bitfourier import (
    BitVector,
    FourierSpectrum,
    FunctionTable,
    g6_spectrum,
    inner_product,
    mask_to_string,
    popcount,
    random_low_degree,
    wht_forward,
    wht_inverse,
)
from .embed import (
    PHASE,
    QRAC,
    Permutation,
    SubsetSelector,
    Triplet,
    double_qrac_embed,
    embedded_states,
    find_swap_routing,
    hadamard_layer,
    permute_mask,
    repeated_phase_embed,
)
from .kernel import kernel_matrix, krr_fit
from .qsim import Circuit, DenseObservable, batch_expectation, run_circuit, expectation
from .synth import (
    ensemble_phase,
    ensemble_qrac,
    kqe_set,
    model_spectrum_phase,
    model_spectrum_qrac,
    phase_multiplicity,
    qrac_multiplicity,
    synth_phase_obs,
    synth_qrac_obs,
    synth_qrac_permuted,
)

EXACT_TOL = 1e-9


@dataclass
class SuiteResult:
    suite: str
    passed: bool = True
    checks: int = 0
    max_error: float = 0.0
    seconds: float = 0.0
    counterexample: dict | None = None
    notes: list[str] = field(default_factory=list)

    def record(self, error: float, tol: float, **context) -> None:
        """Register one check; the first failure is kept as the counterexample."""
        self.checks += 1
        self.max_error = max(self.max_error, float(error))
        if not error <= tol and self.passed:
            self.passed = False
            self.counterexample = {"error": float(error), "tol": tol, **context}

    def require(self, ok: bool, **context) -> None:
        self.record(0.0 if ok else 1.0, 0.5, **context)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": self.checks,
            "max_error": self.max_error,
            "seconds": round(self.seconds, 3),
            "counterexample": self.counterexample,
            "notes": self.notes,
        }


def random_hermitian(m: int, rng: np.random.Generator) -> DenseObservable:
    dim = 1 << m
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return DenseObservable(m, 0.5 * (a + a.conj().T))


def random_kqe_spectrum(m: int, rng: np.random.Generator, n: int | None = None) -> FourierSpectrum:
    """Random coefficients on a random subset of K^QE_m (restricted to n bits)."""
    n = 3 * m if n is None else n
    masks = [s for s in kqe_set(m).masks if s < (1 << n)]
    count = int(rng.integers(1, len(masks) + 1))
    chosen = rng.choice(len(masks), size=count, replace=False)
    return FourierSpectrum(n, {masks[i]: float(rng.uniform(-1, 1)) for i in chosen})


def _table(o, n: int, embedding: str) -> np.ndarray:
    return batch_expectation(o, embedded_states(n, embedding))


def _max_err(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# -- suites ------------------------------------------------------------------

def suite_fourier(rng: np.random.Generator) -> SuiteResult:
    r = SuiteResult("fourier")
    for n in range(1, 7):
        for _ in range(20):
            f = FunctionTable(n, rng.normal(size=1 << n))
            spec = wht_forward(f)
            r.record(_max_err(wht_inverse(spec).values, f.values), 1e-12, n=n, check="roundtrip")
            parseval = abs(inner_product(f, f) - sum(v * v for v in spec.values()))
            r.record(parseval, 1e-10, n=n, check="parseval")
        chis = _parity_matrix(n)
        gram = chis @ chis.T / (1 << n)
        r.record(_max_err(gram, np.eye(1 << n)), 0.0, n=n, check="orthonormality")
    return r


def _parity_matrix(n: int) -> np.ndarray:
    """Row s is chi_s over the cube, built from popcounts (independent of the FWHT)."""
    idx = np.arange(1 << n)
    pc = np.array([popcount(int(v)) for v in range(1 << n)])
    return np.where(pc[np.bitwise_and.outer(idx, idx)] % 2, -1.0, 1.0)


def suite_thm1(rng: np.random.Generator, trials: int = 200) -> SuiteResult:
    r = SuiteResult("thm1")
    for i in range(trials):
        n = int(rng.integers(2, 7))
        spec = random_low_degree(n, n, int(rng.integers(1, (1 << n) + 1)), int(rng.integers(1 << 31)))
        got = _table(synth_phase_obs(spec), n, PHASE)
        r.record(_max_err(got, wht_inverse(spec).values), EXACT_TOL, trial=i, n=n, spectrum=_spec_doc(spec))
    return r


def suite_thm2(rng: np.random.Generator) -> SuiteResult:
    r = SuiteResult("thm2")
    g6 = g6_spectrum()
    e = ensemble_phase(g6, 2)
    r.record(_max_err(e.table().values, wht_inverse(g6).values), EXACT_TOL, check="g6 ensemble")
    for n in range(1, 9):
        for d in range(1, n + 1):
            subsets = [sum(1 << (i - 1) for i in w.w) for w in SubsetSelector.all(n, d)]
            for s in range(1 << n):
                count = sum(1 for w in subsets if s & ~w == 0)
                r.require(count == phase_multiplicity(n, d, popcount(s)), n=n, d=d, s=mask_to_string(s, n))
    for i in range(20):
        n = int(rng.integers(3, 7))
        d = int(rng.integers(1, 3))
        spec = random_low_degree(n, d, int(rng.integers(1, 6)), int(rng.integers(1 << 31)))
        got = ensemble_phase(spec, d).table().values
        r.record(_max_err(got, wht_inverse(spec).values), EXACT_TOL, trial=i, n=n, d=d)
    return r


def suite_thm3(rng: np.random.Generator, trials: int = 200) -> SuiteResult:
    r = SuiteResult("thm3")
    for i in range(trials):
        n = (3, 6)[i % 2]
        spec = random_kqe_spectrum(n // 3, rng)
        got = _table(synth_qrac_obs(spec), n, QRAC)
        r.record(_max_err(got, wht_inverse(spec).values), EXACT_TOL, trial=i, n=n, spectrum=_spec_doc(spec))
    return r


def suite_thm4(rng: np.random.Generator, trials: int = 50) -> SuiteResult:
    """Permuted QRAC models reach tau^{-1}(K^QE) supports."""
    r = SuiteResult("thm4")
    for i in range(trials):
        n = int(rng.choice([3, 4, 5, 6]))
        m = -(-n // 3)
        tau = Permutation(tuple(int(v) + 1 for v in rng.permutation(n)))
        inv = tau.inverse()
        base = random_kqe_spectrum(m, rng, n)
        spec = FourierSpectrum(n, {permute_mask(inv, s): v for s, v in base.items()})
        _, o = synth_qrac_permuted(spec, tau)
        cube = [BitVector(n, permute_mask(tau, b)) for b in range(1 << n)]
        got = batch_expectation(o, embedded_states(n, QRAC, cube))
        r.record(_max_err(got, wht_inverse(spec).values), EXACT_TOL, trial=i, n=n, tau=list(tau.tau))
    return r


def suite_thm5(rng: np.random.Generator, trials: int = 5) -> SuiteResult:
    r = SuiteResult("thm5")
    n = 6
    perms = Permutation.all(n)
    for s in range(1 << n):
        if popcount(s) <= 2:
            brute = sum(1 for tau in perms if _in_kqe_brute(permute_mask(tau, s), 2))
            r.require(brute == qrac_multiplicity(n, s, perms), s=mask_to_string(s, n))
    for i in range(trials):
        spec = random_low_degree(n, 2, int(rng.integers(1, 12)), int(rng.integers(1 << 31)))
        got = ensemble_qrac(spec).table().values
        r.record(_max_err(got, wht_inverse(spec).values), EXACT_TOL, trial=i, spectrum=_spec_doc(spec))
    return r


def _in_kqe_brute(mask: int, m: int) -> bool:
    return all(popcount((mask >> (3 * j)) & 7) <= 1 for j in range(m)) and mask < (1 << 3 * m)


def suite_appendix_a1(rng: np.random.Generator, trials: int = 5) -> SuiteResult:
    """Repeated phase embedding (n=4, m=2, r=2) reaches a weight-4 coefficient."""
    r = SuiteResult("appendixA1")
    partition = [SubsetSelector((1, 2)), SubsetSelector((3, 4))]
    mix = Circuit(2).ry(0, np.pi / 3).ry(1, np.pi / 5).cz(0, 1)
    blocks = [hadamard_layer(2), mix]
    states = np.array([
        run_circuit(repeated_phase_embed(b, partition, blocks)).amplitudes for b in BitVector.all(4)
    ])
    for i in range(trials):
        o = random_hermitian(2, rng)
        spec = wht_forward(FunctionTable(4, batch_expectation(o, states)))
        top = abs(spec.coeff(0b1111))
        r.require(top > 1e-6, trial=i, weight4_coeff=top)
        r.notes.append(f"trial {i}: |coeff(1111)| = {top:.3e}")
    return r


def suite_appendix_a2(rng: np.random.Generator, trials: int = 20) -> SuiteResult:
    """Double QRAC on one qubit reaches every mask of B^3."""
    r = SuiteResult("appendixA2")
    states = [double_qrac_embed(Triplet(*b.bits)) for b in BitVector.all(3)]
    smallest = np.inf
    for i in range(trials):
        o = random_hermitian(1, rng)
        spec = wht_forward(FunctionTable(3, [expectation(o, st) for st in states]))
        low = min(abs(spec.coeff(s)) for s in range(8))
        smallest = min(smallest, low)
        r.require(low > 1e-6, trial=i, smallest_coeff=low)
    r.notes.append(f"smallest coefficient magnitude {smallest:.3e}")
    return r


def suite_appendix_b(rng: np.random.Generator) -> SuiteResult:
    r = SuiteResult("appendixB")
    for subset in itertools.combinations(range(1, 5), 2):
        beta = find_swap_routing(4, subset)
        r.require(beta is not None, subset=list(subset))
        if beta is not None:
            r.notes.append(f"{list(subset)} -> beta {[round(b, 6) for b in beta]}")
    return r


def suite_kernel(rng: np.random.Generator) -> SuiteResult:
    r = SuiteResult("kernel")
    for n in (3, 4, 6):
        k = kernel_matrix(BitVector.all(n), QRAC)
        r.record(max(0.0, -k.min_eigenvalue()), 1e-9, n=n, check="qrac psd")
    cube = BitVector.all(3)
    k = kernel_matrix(cube, QRAC)
    for i in range(10):
        spec = random_kqe_spectrum(1, rng)
        y = wht_inverse(spec).values
        alpha = krr_fit(k, y, 0.0)
        r.record(_max_err(k.entries @ alpha, y), 1e-8, trial=i, check="interpolation")
    for n in (2, 3, 4):
        r.record(_max_err(kernel_matrix(BitVector.all(n), PHASE).entries, np.eye(1 << n)), 0.0,
                 n=n, check="phase identity")
    return r


def suite_oracles(rng: np.random.Generator, trials: int = 20) -> SuiteResult:
    """Closed-form model spectra agree with the WHT of simulated tables."""
    r = SuiteResult("oracles")
    for i in range(trials):
        m = int(rng.integers(1, 5))
        o = random_hermitian(m, rng)
        got = model_spectrum_phase(o).dense()
        want = wht_forward(FunctionTable(m, _table(o, m, PHASE))).dense()
        r.record(_max_err(got, want), EXACT_TOL, trial=i, m=m, embedding=PHASE)
        got = model_spectrum_qrac(o).dense()
        want = wht_forward(FunctionTable(3 * m, _table(o, 3 * m, QRAC))).dense()
        r.record(_max_err(got, want), EXACT_TOL, trial=i, m=m, embedding=QRAC)
    return r


def _spec_doc(spec: FourierSpectrum) -> dict:
    return {mask_to_string(s, spec.n): v for s, v in spec.items()}


SUITES: dict[str, Callable[[np.random.Generator], SuiteResult]] = {
    "fourier": suite_fourier,
    "thm1": suite_thm1,
    "thm2": suite_thm2,
    "thm3": suite_thm3,
    "thm4": suite_thm4,
    "thm5": suite_thm5,
    "appendixA1": suite_appendix_a1,
    "appendixA2": suite_appendix_a2,
    "appendixB": suite_appendix_b,
    "kernel": suite_kernel,
    "oracles": suite_oracles,
}


def run_suite(name: str, seed: int = 0) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    start = time.perf_counter()
    result = SUITES[name](np.random.default_rng(seed))
    result.seconds = time.perf_counter() - start
    return result
