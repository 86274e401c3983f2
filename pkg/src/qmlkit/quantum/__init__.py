"""Dense statevector simulation for small qubit registers."""
from .gates import CNOT, FIXED_1Q, FIXED_2Q, ROTATIONS, Gate, H, Rx, Ry, Rz, Rzz, arity, rotation_matrix
from .pauli import (
    PauliHamiltonian,
    PauliString,
    exact_diagonalize,
    expectation,
    tfim_chain,
    xxz_chain,
    zz_weighted,
)
from .state import (
    MAX_SITES,
    StateVector,
    apply_gate,
    apply_matrix,
    bits_of,
    bitstring,
    entanglement_entropy,
    index_of,
    reduced_density_matrix,
    sample_bitstrings,
)

__all__ = [
    "CNOT", "FIXED_1Q", "FIXED_2Q", "Gate", "H", "MAX_SITES", "PauliHamiltonian", "PauliString",
    "ROTATIONS", "Rx", "Ry", "Rz", "Rzz", "StateVector", "apply_gate", "apply_matrix", "arity",
    "bits_of", "bitstring", "entanglement_entropy", "exact_diagonalize", "expectation", "index_of",
    "reduced_density_matrix", "rotation_matrix", "sample_bitstrings", "tfim_chain", "xxz_chain",
    "zz_weighted",
]
