"""Circuit synthesis: benchmark generators, Grover gates, permutation search, lowering."""
from .algorithms import (
    build_basic_zeroflip,
    build_fermat_circuit,
    build_general_circuit,
    build_qnr17_reduced,
    jacobi_table,
    qnr17_permutation,
)
from .lowering import is_lowered, lower, route_nearest_neighbor, transformation_synthesis
from .permutation import (
    PermutationSearchResult,
    circuit_permutation,
    search_node_limit,
    synthesize_indicator_permutation,
)
from .phasepoly import GroverGatePlan, build_grover_gate, phase_network, walsh_phases

__all__ = [
    "GroverGatePlan",
    "PermutationSearchResult",
    "build_basic_zeroflip",
    "build_fermat_circuit",
    "build_general_circuit",
    "build_grover_gate",
    "build_qnr17_reduced",
    "circuit_permutation",
    "is_lowered",
    "jacobi_table",
    "lower",
    "phase_network",
    "qnr17_permutation",
    "route_nearest_neighbor",
    "search_node_limit",
    "synthesize_indicator_permutation",
    "transformation_synthesis",
    "walsh_phases",
]
