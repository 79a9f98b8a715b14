"""Agmon-type decay estimates for eigenvectors of graph Schrodinger operators.

The operator is ``H = L + diag(W)`` with ``L = D - A`` the combinatorial
Laplacian of a finite connected graph and ``W`` a vertex potential.
"""

from .bounds import BoundReport, GreedyPath, greedy_path, verify_refined, verify_theorem
from .experiments import TreeExperiment, check_level_recurrence, compare_decay_rates, run_tree_experiment
from .graph import (
    Graph,
    as_potential,
    gen_cycle,
    gen_grid,
    gen_path,
    gen_random_connected,
    gen_tree_hub,
    load_edge_list,
    load_graph,
    save_graph,
    validate,
)
from .metric import AgmonField, agmon_distance, agmon_distance_to, fmt_distance, node_cost
from .spectral import EigenPair, Hamiltonian, assemble, eig_all, eig_smallest, rayleigh_quotient
from .stochastic import WalkBound, compute_delta, exact_moment, mc_moment, verify_walk_bound

__version__ = "0.1.0"
