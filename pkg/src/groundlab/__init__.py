"""groundlab: a numerical laboratory for programming Hamiltonian ground states.

Boolean problems become diagonal Ising/Pauli operators, many-body terms reduce
to two-body via exact and perturbative gadgets with verified spectral error,
and variational circuits (QAOA, variational search, clock constructions) are
simulated and optimized exactly at desk scale, with brute-force oracles.
"""

from .paulis import (
    CliffordCircuit,
    OperatorSum,
    PauliString,
    StateVector,
    clifford_conjugate,
    evolve,
    expectation,
    ground,
    is_stoquastic,
    realize_dense,
    trotter_evolve,
)

__version__ = "0.1.0"

__all__ = [
    "CliffordCircuit",
    "OperatorSum",
    "PauliString",
    "StateVector",
    "clifford_conjugate",
    "evolve",
    "expectation",
    "ground",
    "is_stoquastic",
    "realize_dense",
    "trotter_evolve",
    "__version__",
]
