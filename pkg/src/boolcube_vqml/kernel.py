"""Fidelity-kernel baseline and kernel ridge regression."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .bitfourier import BitVector, fwht
from .embed import PHASE, embedded_states

PSD_TOL = 1e-9
JITTER_START = 1e-10
JITTER_MAX = 1e-6
DEFAULT_RIDGE = 1e-8
INTERP_TOL = 1e-8


class SingularKernelError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class KernelMatrix:
    """Gram matrix of the fidelity kernel over ``inputs``."""

    inputs: tuple[BitVector, ...]
    entries: np.ndarray

    def __post_init__(self):
        t = len(self.inputs)
        if self.entries.shape != (t, t):
            raise ValueError(f"kernel matrix must be {t}x{t}")
        if not np.allclose(self.entries, self.entries.T, atol=1e-12):
            raise ValueError("kernel matrix is not symmetric")
        self.entries.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.inputs)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def is_psd(self, tol: float = PSD_TOL) -> bool:
        return self.min_eigenvalue() >= -tol

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([str(b) for b in self.inputs])
        for row in self.entries:
            writer.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "KernelMatrix":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if not rows:
            raise ValueError("empty kernel CSV")
        inputs = tuple(BitVector.from_string(s.strip()) for s in rows[0])
        return cls(inputs, np.array([[float(v) for v in r] for r in rows[1:]]))


def _overlaps(rows: Sequence[BitVector], cols: Sequence[BitVector], embedding: str) -> np.ndarray:
    """Matrix of ``|<psi(r)|psi(c)>|^2``."""
    n = rows[0].n
    if embedding == PHASE:
        # <psi_a|psi_b> = 2^-n sum_k (-1)^{(a+b).k}; integer arithmetic keeps it exact
        signs = fwht(np.eye(1 << n))
        ra, cb = [b.mask for b in rows], [b.mask for b in cols]
        return (signs[ra] @ signs[cb].T / (1 << n)) ** 2
    psi_r = embedded_states(n, embedding, rows)
    psi_c = embedded_states(n, embedding, cols)
    return np.abs(psi_r.conj() @ psi_c.T) ** 2


def _check_inputs(inputs: Sequence[BitVector]) -> None:
    if len({b.n for b in inputs}) > 1:
        raise ValueError("inputs have different lengths")


def fidelity_kernel(b1: BitVector, b2: BitVector, embedding: str) -> float:
    """``|<psi(b1)|psi(b2)>|^2`` for the chosen embedding."""
    _check_inputs([b1, b2])
    return float(min(1.0, _overlaps([b1], [b2], embedding)[0, 0]))


def kernel_matrix(inputs: Sequence[BitVector], embedding: str) -> KernelMatrix:
    inputs = tuple(inputs)
    if not inputs:
        raise ValueError("kernel matrix needs at least one input")
    _check_inputs(inputs)
    k = _overlaps(inputs, inputs, embedding)
    k = 0.5 * (k + k.T)
    np.fill_diagonal(k, 1.0)
    return KernelMatrix(inputs, np.minimum(k, 1.0))


def krr_fit(k: KernelMatrix | np.ndarray, y, beta: float = DEFAULT_RIDGE) -> np.ndarray:
    """Solve ``(K + beta I) alpha = y`` by Cholesky.

    A failed or near-singular factorisation is retried with diagonal jitter
    from 1e-10, raised tenfold up to 1e-6. Fidelity Gram matrices are often
    rank deficient (a qubit carries three bits), so with ``beta = 0`` a
    jittered solve is accepted as long as it still interpolates the labels;
    labels outside the range of K raise ``SingularKernelError``.
    """
    mat = k.entries if isinstance(k, KernelMatrix) else np.asarray(k, dtype=float)
    y = np.asarray(y, dtype=float)
    if beta < 0:
        raise ValueError("ridge parameter must be >= 0")
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or y.shape != (mat.shape[0],):
        raise ValueError("kernel and label dimensions do not match")
    system = mat + beta * np.eye(len(y))
    alpha = None
    for jitter in [0.0] + list(np.geomspace(JITTER_START, JITTER_MAX, 5)):
        try:
            chol, lower = scipy.linalg.cho_factor(system + jitter * np.eye(len(y)), lower=True)
        except np.linalg.LinAlgError:
            continue
        if jitter == 0.0 and _ill_conditioned(chol):
            continue
        alpha = scipy.linalg.cho_solve((chol, lower), y)
        break
    if alpha is None:
        raise SingularKernelError("kernel system is singular even with jitter")
    if beta == 0.0:
        resid = np.max(np.abs(mat @ alpha - y), initial=0.0)
        if resid > INTERP_TOL * max(1.0, np.max(np.abs(y), initial=0.0)):
            raise SingularKernelError(f"kernel matrix is singular and labels are not interpolable (residual {resid:.2e}); use beta > 0")
    return alpha


def _ill_conditioned(chol: np.ndarray) -> bool:
    diag = np.abs(np.diag(chol))
    return diag.min() <= 1e-7 * diag.max()


def krr_predict(alpha, training_inputs: Sequence[BitVector], b: BitVector, embedding: str) -> float:
    """Representer-form prediction ``sum_i alpha_i k(x_i, b)``."""
    alpha = np.asarray(alpha, dtype=float)
    training_inputs = list(training_inputs)
    if alpha.shape != (len(training_inputs),):
        raise ValueError("alpha length must equal the training size")
    if not training_inputs:
        return 0.0
    _check_inputs(training_inputs + [b])
    kvec = _overlaps(training_inputs, [b], embedding)[:, 0]
    return float(alpha @ kvec)
