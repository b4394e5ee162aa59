"""Cyclic Jacobi eigendecomposition for small Hermitian matrices."""
from __future__ import annotations

import numpy as np

from .operators import HERMITIAN_TOL, DenseObservable


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tournament schedule: n-1 rounds of n/2 disjoint pairs (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        lo, hi = np.minimum(p, q), np.maximum(p, q)
        rounds.append((lo, hi))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(a: np.ndarray, tol: float = 1e-15, max_sweeps: int = 50):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.

    Every off-diagonal pair (p, q) is annihilated by a complex rotation: a
    phase on column q makes ``a[p, q]`` real, then a real Givens rotation
    zeroes it. Pairs are visited in round-robin order so each round applies
    n/2 disjoint rotations at once. Sweeps stop when the off-diagonal norm is
    below ``tol`` times the matrix norm.
    """
    a = np.array(a, dtype=complex, copy=True)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n):
        raise ValueError("matrix must be square")
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    if n % 2:
        # pad with a decoupled zero row/column; stripped at the end
        a = np.pad(a, ((0, 1), (0, 1)))
    size = a.shape[0]
    v = np.eye(size, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0 or size == 1:
        return np.real(np.diag(a))[:n], np.eye(n, dtype=complex)
    rounds = _round_robin(size)
    for _ in range(max_sweeps):
        if _off_norm(a) <= tol * scale:
            break
        for p, q in rounds:
            apq = a[p, q]
            mag = np.abs(apq)
            active = mag > 1e-300
            phase = np.where(active, apq / np.where(active, mag, 1.0), 1.0)
            safe = np.where(active, mag, 1.0)
            theta = (a[q, q].real - a[p, p].real) / (2.0 * safe)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ph = phase.conjugate()
            # J on (p, q) = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * (s * ph)
            a[:, q] = cp * s + cq * (c * ph)
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - (s * phase)[:, None] * rq
            a[q, :] = s[:, None] * rp + (c * phase)[:, None] * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * (s * ph)
            v[:, q] = vp * s + vq * (c * ph)
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    evals = np.real(np.diag(a))
    if n % 2:
        # the padding eigenvector is the last basis vector
        keep = np.argsort(np.abs(v[n, :]))[:n]
        evals, v = evals[keep], v[:n, keep]
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]


def eigh(o: DenseObservable | np.ndarray):
    """Ascending eigenvalues and eigenvectors, ``o = V diag(lam) V^dagger``."""
    mat = o.matrix if isinstance(o, DenseObservable) else o
    return jacobi_eigh(mat)
