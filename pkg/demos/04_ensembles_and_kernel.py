"""Exact g6 ensembles and the fidelity-kernel baseline."""
import numpy as np

from boolcube_vqml.bitfourier import BitVector, g6_spectrum, wht_inverse
from boolcube_vqml.embed import PHASE, QRAC
from boolcube_vqml.kernel import kernel_matrix, krr_fit, krr_predict
from boolcube_vqml.synth import ensemble_phase, ensemble_qrac

g6 = g6_spectrum()
target = wht_inverse(g6).values

# two-qubit phase members, one per chosen subset of bits
phase = ensemble_phase(g6, 2)
print(f"phase ensemble: {len(phase)} members, max error {np.max(np.abs(phase.table().values - target)):.1e}")

# QRAC members routed through bit permutations
qrac = ensemble_qrac(g6)
print(f"QRAC ensemble: {len(qrac)} members, max error {np.max(np.abs(qrac.table().values - target)):.1e}")

# kernel ridge regression on the same cube
cube = BitVector.all(6)
k = kernel_matrix(cube, QRAC)
print(f"QRAC Gram: min eigenvalue {k.min_eigenvalue():.1e}, rank {np.linalg.matrix_rank(k.entries, 1e-9)} of {k.size}")
alpha = krr_fit(k, target, beta=1e-6)
pred = np.array([krr_predict(alpha, cube, b, QRAC) for b in cube])
print(f"ridge fit, max error {np.max(np.abs(pred - target)):.1e}")

# distinct inputs give orthogonal phase states, so the phase kernel is the identity
print("phase kernel is identity:", np.array_equal(kernel_matrix(cube, PHASE).entries, np.eye(64)))
