"""Dense statevector / density-matrix simulator."""
from .circuit import (
    MAX_QUBITS,
    Circuit,
    Gate,
    Param,
    apply_gate,
    circuit_unitary,
    rn_matrix,
    run_circuit,
    rz_matrix,
    ry_matrix,
    simulate,
    swaprot_matrix,
)
from .linalg import eigh, jacobi_eigh
from .operators import (
    DenseObservable,
    PauliSum,
    batch_expectation,
    expectation,
    pauli_to_dense,
    sample_expectation,
)
from .state import QuantumState, tensor

__all__ = [
    "MAX_QUBITS",
    "Circuit",
    "Gate",
    "Param",
    "apply_gate",
    "circuit_unitary",
    "rn_matrix",
    "run_circuit",
    "rz_matrix",
    "ry_matrix",
    "simulate",
    "swaprot_matrix",
    "eigh",
    "jacobi_eigh",
    "DenseObservable",
    "PauliSum",
    "batch_expectation",
    "expectation",
    "pauli_to_dense",
    "sample_expectation",
    "QuantumState",
    "tensor",
]
