"""Qubit operators: Pauli algebra, Jordan-Wigner mapping, CNOT accounting."""
from .fermion import (
    build_hamiltonian,
    hopping,
    jordan_wigner_excitation,
    ladder,
    number_operator,
    spin_orbital,
)
from .pauli import PauliString, PauliSum, cnot_count
