"""Semiclassical tunneling on finite graphs via interaction matrices."""

__version__ = "0.1.0"

from .graph_core import Graph, Potential, WellSet, bfs_distance, build_graph, detect_wells, make_potential
from .hamiltonian import build_hamiltonian, dirichlet_ground_state, dirichlet_restriction
from .linalg import solve_linear, subspace_distance, sym_eigen
from .tunneling import (
    interaction_matrix_appendixA,
    interaction_matrix_leading,
    psi_lambda_exact,
    psi_lambda_pathsum,
    solve_mu,
    verify_order,
)

__all__ = [
    "Graph", "Potential", "WellSet", "bfs_distance", "build_graph", "detect_wells", "make_potential",
    "build_hamiltonian", "dirichlet_ground_state", "dirichlet_restriction",
    "solve_linear", "subspace_distance", "sym_eigen",
    "interaction_matrix_appendixA", "interaction_matrix_leading", "psi_lambda_exact",
    "psi_lambda_pathsum", "solve_mu", "verify_order",
]
