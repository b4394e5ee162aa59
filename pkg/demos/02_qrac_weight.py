"""QRAC synthesis and the 2^m overshoot of the printed weight.

Three bits share one qubit, so each Pauli factor shrinks a coefficient by
1/sqrt(3). The synthesis weight undoes exactly that shrinkage; an extra 2^m
factor scales the whole model by 2^m.
"""
import numpy as np

from boolcube_vqml.bitfourier import g6_spectrum, wht_inverse
from boolcube_vqml.embed import QRAC, embedded_states
from boolcube_vqml.qsim import batch_expectation
from boolcube_vqml.synth import synth_qrac_obs

g6 = g6_spectrum()
target = wht_inverse(g6).values
states = embedded_states(6, QRAC)
m = 2

o = synth_qrac_obs(g6)
model = batch_expectation(o, states)
print("corrected weight, max error:", np.max(np.abs(model - target)))

printed = batch_expectation(o * float(1 << m), states)
ratio = printed[np.abs(target) > 1e-12] / target[np.abs(target) > 1e-12]
print("printed weight, model / target ratios:", np.unique(np.round(ratio, 12)))
