"""Polynomial-size linear model for subgraph isomorphism, with exact certificates."""

from .compat import CompatMatrix, SolutionGrid, build_compat, enumerate_grids, grid_to_compat, propagate
from .graph import (
    Digraph,
    InvalidInstance,
    ParseError,
    SplitMix64,
    WeightedDigraph,
    pad_pattern,
    parse_digraph,
    parse_weighted_digraph,
    random_digraph,
    random_weighted_digraph,
    relabel,
    serialize_digraph,
    serialize_weighted_digraph,
)
from .harness import AgreementReport, compare, compare_exhaustive, worked_examples, run_examples, solve_instance
from .model import (
    LinearSystem,
    Var,
    X,
    Y,
    aggregate,
    build_base_system,
    center_point,
    check_assignment,
    emit_lp,
    grid_to_point,
    point_to_grid,
    zero_constraints,
)
from .oracle import Verdict, check_embedding, count_embeddings, sat_brute_force, subgi_brute_force, tsp_brute_force
from .reductions import CNF, parse_cnf, random_cnf, sat_to_subgi, tsp_model
from .solver import (
    FarkasWitness,
    Feasible,
    Infeasible,
    LimitExceeded,
    Optimal,
    Unbounded,
    feasibility,
    optimize,
    verify_certificate,
    verify_optimal,
)

__version__ = "0.1.0"
