"""Training variational linear quantum models on the Boolean cube.

A model is ``f(b) = Tr[D W(theta) rho(b) W(theta)^dagger]`` where ``rho`` is a
fixed embedding, ``W`` a hardware-efficient ansatz and ``D`` a Z-type
observable (default ``Z^{(x)m}``). Evaluation is batched: the whole training
set is embedded once and pushed through the ansatz as one array.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .bitfourier import BitVector, FourierSpectrum, FunctionTable, wht_inverse
from .embed import PHASE, QRAC, Permutation, SubsetSelector, embedded_states, permute_bits, qubits_for, select_bits
from .qsim import Circuit, DenseObservable, Param, PauliSum, circuit_unitary, simulate
from .synth import model_spectrum_phase, model_spectrum_qrac

OPTIMIZERS = ("nelder-mead", "cobyla", "spsa", "lbfgs")
CONVERGED_LOSS = 1e-10
DENSE_EXTRACT_MAX = 10


def default_layers(m: int) -> int:
    return 3 if m <= 3 else 4


@dataclass(frozen=True)
class Ansatz:
    """Layers of RY and RZ on every qubit, then CZ on neighbours (q, q+1).

    Parameter ``layer * 2m + 2q`` drives RY on qubit q, the next index RZ.
    """

    m: int
    layers: int

    def __post_init__(self):
        if self.m < 1 or self.layers < 1:
            raise ValueError("ansatz needs at least one qubit and one layer")

    @property
    def num_params(self) -> int:
        return 2 * self.m * self.layers

    def circuit(self) -> Circuit:
        c = Circuit(self.m)
        for layer in range(self.layers):
            base = 2 * self.m * layer
            for q in range(self.m):
                c.ry(q, Param(base + 2 * q)).rz(q, Param(base + 2 * q + 1))
            for q in range(self.m - 1):
                c.cz(q, q + 1)
        return c

    def unitary(self, theta) -> np.ndarray:
        return circuit_unitary(self.circuit(), self._check(theta))

    def _check(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.num_params,):
            raise ValueError(f"ansatz takes {self.num_params} parameters, got {theta.shape}")
        return theta


@dataclass
class TrainingSet:
    inputs: list[BitVector]
    targets: np.ndarray

    def __post_init__(self):
        self.targets = np.asarray(self.targets, dtype=float)
        if not self.inputs:
            raise ValueError("training set is empty")
        if len(self.inputs) != len(self.targets):
            raise ValueError("inputs and targets differ in length")
        if len({b.n for b in self.inputs}) != 1:
            raise ValueError("inputs have inconsistent lengths")
        self._states: dict[str, np.ndarray] = {}

    @property
    def n(self) -> int:
        return self.inputs[0].n

    def __len__(self) -> int:
        return len(self.inputs)

    @classmethod
    def full_cube(cls, target: FourierSpectrum | FunctionTable) -> "TrainingSet":
        table = wht_inverse(target) if isinstance(target, FourierSpectrum) else target
        return cls(BitVector.all(table.n), table.values.copy())

    def states(self, embedding: str, preprocessor=None) -> np.ndarray:
        key = f"{embedding}:{preprocessor!r}"
        if key not in self._states:
            inputs = [_preprocess(preprocessor, b) for b in self.inputs]
            self._states[key] = embedded_states(inputs[0].n, embedding, inputs)
        return self._states[key]


def _preprocess(pre, b: BitVector) -> BitVector:
    if pre is None:
        return b
    if isinstance(pre, Permutation):
        return permute_bits(pre, b)
    if isinstance(pre, SubsetSelector):
        return select_bits(pre, b)
    raise TypeError(f"unsupported preprocessor {type(pre).__name__}")


@dataclass
class TrainConfig:
    optimizer: str = "nelder-mead"
    budget: int = 1000
    seed: int = 0
    shots: int = 0
    init: str = "uniform"

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")
        if self.init not in ("uniform", "zeros"):
            raise ValueError("init must be 'uniform' or 'zeros'")

    def initial_point(self, num_params: int) -> np.ndarray:
        if self.init == "zeros":
            return np.zeros(num_params)
        return np.random.default_rng(self.seed).uniform(-np.pi, np.pi, num_params)


def _check_diag(d: PauliSum, m: int) -> None:
    if d.m != m:
        raise ValueError(f"measurement acts on {d.m} qubits, model has {m}")
    if not d.is_diagonal():
        raise ValueError("measurement observable must contain only I and Z")


@dataclass
class LinearModel:
    """One variational linear model, optionally fed a preprocessed input."""

    embedding: str
    ansatz: Ansatz
    d: PauliSum
    preprocessor: SubsetSelector | Permutation | None = None

    def __post_init__(self):
        _check_diag(self.d, self.ansatz.m)
        self._circuit = self.ansatz.circuit()
        self._diag = self.d.diagonal()

    @property
    def num_params(self) -> int:
        return self.ansatz.num_params

    def values(self, theta, states: np.ndarray, shots: int = 0, rng=None) -> np.ndarray:
        theta = self.ansatz._check(theta)
        if states.shape[1] != 1 << self.ansatz.m:
            raise ValueError("embedded input does not match the ansatz width")
        out = simulate(self._circuit, theta, states)
        probs = np.abs(out) ** 2
        if shots == 0:
            return probs @ self._diag
        if rng is None:
            raise ValueError("shot sampling needs a generator")
        probs = probs / probs.sum(axis=1, keepdims=True)
        counts = np.array([rng.multinomial(shots, p) for p in probs])
        return counts @ self._diag / shots


@dataclass
class ModelEnsemble:
    """Classical sum of linear models; parameters are concatenated in order."""

    members: list[LinearModel] = field(default_factory=list)

    @property
    def num_params(self) -> int:
        return sum(mem.num_params for mem in self.members)

    def split(self, theta) -> list[np.ndarray]:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.num_params,):
            raise ValueError(f"ensemble takes {self.num_params} parameters, got {theta.shape}")
        out, start = [], 0
        for mem in self.members:
            out.append(theta[start:start + mem.num_params])
            start += mem.num_params
        return out

    def values(self, theta, t: TrainingSet, shots: int = 0, rng=None) -> np.ndarray:
        total = np.zeros(len(t))
        for mem, th in zip(self.members, self.split(theta)):
            total += mem.values(th, t.states(mem.embedding, mem.preprocessor), shots, rng)
        return total


def model_eval(
    embedding: str,
    ansatz: Ansatz,
    theta,
    d: PauliSum,
    b: BitVector,
    shots: int = 0,
    seed: int = 0,
) -> float:
    """Model output ``Tr[D W rho(b) W^dagger]`` for one input."""
    if qubits_for(b.n, embedding) != ansatz.m:
        raise ValueError(f"{embedding} embedding of {b.n} bits needs {qubits_for(b.n, embedding)} qubits")
    model = LinearModel(embedding, ansatz, d)
    rng = np.random.Generator(np.random.Philox(seed)) if shots else None
    return float(model.values(theta, embedded_states(b.n, embedding, [b]), shots, rng)[0])


def _as_model(ansatz, embedding, d, preprocessor=None) -> ModelEnsemble:
    if d is None:
        d = PauliSum.all_z(ansatz.m)
    return ModelEnsemble([LinearModel(embedding, ansatz, d, preprocessor)])


def empirical_risk(
    theta,
    ansatz: Ansatz,
    d: PauliSum,
    t: TrainingSet,
    embedding: str,
    shots: int = 0,
    rng=None,
) -> float:
    """Mean of ``(y - f(b))^2 / 2`` over the training set; no regulariser."""
    return _risk(_as_model(ansatz, embedding, d), theta, t, shots, rng)


def _risk(model: ModelEnsemble, theta, t: TrainingSet, shots=0, rng=None) -> float:
    if len(t) == 0:
        raise ValueError("training set is empty")
    resid = t.targets - model.values(theta, t, shots, rng)
    return float(0.5 * np.mean(resid ** 2))


def parameter_shift_grad(
    theta,
    index: int,
    ansatz: Ansatz,
    d: PauliSum,
    b: BitVector,
    embedding: str,
    shots: int = 0,
    seed: int = 0,
) -> float:
    """d f / d theta_index from evaluations at theta_index +- pi/2."""
    theta = ansatz._check(theta)
    if not 0 <= index < ansatz.num_params:
        raise IndexError(f"parameter index {index} out of range")
    if shots:
        warnings.warn("parameter-shift gradient from sampled expectations is noisy", stacklevel=2)
    plus, minus = theta.copy(), theta.copy()
    plus[index] += np.pi / 2
    minus[index] -= np.pi / 2
    f_plus = model_eval(embedding, ansatz, plus, d, b, shots, seed)
    f_minus = model_eval(embedding, ansatz, minus, d, b, shots, seed + 1)
    return 0.5 * (f_plus - f_minus)


def _risk_gradient(model: ModelEnsemble, theta, t: TrainingSet) -> np.ndarray:
    """Exact risk gradient via parameter shifts on every parameter."""
    theta = np.asarray(theta, dtype=float)
    resid = t.targets - model.values(theta, t)
    grad = np.zeros_like(theta)
    for i in range(theta.size):
        shifted = theta.copy()
        shifted[i] += np.pi / 2
        f_plus = model.values(shifted, t)
        shifted[i] -= np.pi
        f_minus = model.values(shifted, t)
        grad[i] = -np.mean(resid * 0.5 * (f_plus - f_minus))
    return grad


class _Converged(Exception):
    pass


class _Objective:
    """Counts evaluations and remembers the best point seen."""

    def __init__(self, fn):
        self.fn = fn
        self.best_x = None
        self.best = np.inf
        self.trace: list[float] = []

    def __call__(self, x):
        val = self.fn(x)
        if val < self.best:
            self.best, self.best_x = val, np.array(x, dtype=float)
        if self.best < CONVERGED_LOSS:
            raise _Converged
        return val

    def record(self, *_args, **_kwargs):
        self.trace.append(self.best)


def _spsa(obj: _Objective, x0: np.ndarray, budget: int, seed: int) -> None:
    """Simultaneous-perturbation stochastic approximation (standard gains)."""
    rng = np.random.default_rng(seed + 7919)
    a, c, big_a, alpha, gamma = 0.2, 0.1, 0.1 * budget, 0.602, 0.101
    x = x0.copy()
    for k in range(budget):
        ak = a / (k + 1 + big_a) ** alpha
        ck = c / (k + 1) ** gamma
        delta = rng.choice((-1.0, 1.0), size=x.size)
        g = (obj(x + ck * delta) - obj(x - ck * delta)) / (2 * ck) * delta
        x = x - ak * g
        obj(x)
        obj.record()


def optimize_model(
    config: TrainConfig, t: TrainingSet, model: ModelEnsemble, theta0=None
) -> tuple[np.ndarray, list[float]]:
    """Minimise the empirical risk of ``model``; returns (best theta, loss trace).

    The trace holds the best loss seen after each optimiser iteration, so it
    never increases. Running out of budget is not an error.
    """
    if config.shots and config.optimizer == "lbfgs":
        warnings.warn("lbfgs with sampled losses uses exact gradients but noisy values", stacklevel=2)
    rng = np.random.Generator(np.random.Philox(config.seed)) if config.shots else None
    x0 = config.initial_point(model.num_params) if theta0 is None else np.asarray(theta0, float)
    obj = _Objective(lambda x: _risk(model, x, t, config.shots, rng))
    try:
        obj(x0)
        obj.record()
        if config.optimizer == "nelder-mead":
            minimize(
                obj, x0, method="Nelder-Mead", callback=obj.record,
                options={"maxiter": config.budget, "maxfev": 50 * config.budget,
                         "xatol": 1e-12, "fatol": 1e-14, "adaptive": model.num_params > 8},
            )
        elif config.optimizer == "cobyla":
            minimize(
                obj, x0, method="COBYLA", callback=obj.record,
                options={"maxiter": config.budget, "rhobeg": 0.5, "tol": 1e-12},
            )
        elif config.optimizer == "lbfgs":
            minimize(
                obj, x0, method="L-BFGS-B", jac=lambda x: _risk_gradient(model, x, t),
                callback=obj.record,
                options={"maxiter": config.budget, "ftol": 1e-16, "gtol": 1e-12},
            )
        else:
            _spsa(obj, x0, config.budget, config.seed)
    except _Converged:
        obj.record()
    return obj.best_x, obj.trace


def optimize(
    config: TrainConfig,
    t: TrainingSet,
    ansatz: Ansatz,
    embedding: str,
    d: PauliSum | None = None,
    preprocessor: SubsetSelector | Permutation | None = None,
    theta0=None,
) -> tuple[np.ndarray, list[float]]:
    """Train one linear model (``d`` defaults to ``Z^{(x)m}``)."""
    return optimize_model(config, t, _as_model(ansatz, embedding, d, preprocessor), theta0)


def trained_observable(theta, ansatz: Ansatz, d: PauliSum | None = None) -> DenseObservable:
    """Dense ``O = W^dagger D W`` for the trained parameters."""
    if ansatz.m > DENSE_EXTRACT_MAX:
        raise ValueError(f"dense observable limited to {DENSE_EXTRACT_MAX} qubits")
    d = PauliSum.all_z(ansatz.m) if d is None else d
    _check_diag(d, ansatz.m)
    w = ansatz.unitary(theta)
    return DenseObservable(ansatz.m, w.conj().T @ np.diag(d.diagonal()) @ w)


def extract_trained_spectrum(
    theta,
    ansatz: Ansatz,
    d: PauliSum | None,
    embedding: str,
    n: int | None = None,
) -> FourierSpectrum:
    """Fourier spectrum of the trained model read off ``W^dagger D W``."""
    obs = trained_observable(theta, ansatz, d)
    if embedding == PHASE:
        return model_spectrum_phase(obs)
    if embedding == QRAC:
        return model_spectrum_qrac(obs, ansatz.m, n)
    raise ValueError(f"unknown embedding {embedding!r}")


def model_table(
    theta, ansatz: Ansatz, d: PauliSum | None, embedding: str, n: int,
    preprocessor: SubsetSelector | Permutation | None = None,
) -> FunctionTable:
    """Model output on the whole cube."""
    model = _as_model(ansatz, embedding, d, preprocessor)
    t = TrainingSet(BitVector.all(n), np.zeros(1 << n))
    return FunctionTable(n, model.values(theta, t))
