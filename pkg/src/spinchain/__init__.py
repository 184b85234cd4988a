"""Compressed simulation of admissible (number-preserving matchgate) qubit chains."""

from .chains import (
    ChainSpec,
    adjacency_hamiltonian,
    perfect_transfer_hamiltonian,
    single_particle_hamiltonian,
    spin_rotation_matrix,
)
from .gates import (
    GateClass,
    MatchgateParams,
    TermCoefficients,
    builtin_gate,
    classify_gate,
    compose_matchgate,
    decompose_matchgate,
    hamiltonian_from_terms,
    terms_from_hamiltonian,
)
from .simulate import (
    Circuit,
    CompressedEvolution,
    FockBasisState,
    compile_circuit,
    compile_hamiltonian,
    evolve_single,
    multi_amplitude,
    multi_site_probabilities,
    single_site_probabilities,
)

__version__ = "0.1.0"
