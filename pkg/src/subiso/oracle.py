"""Brute-force deciders used as ground truth.

Nothing here is clever on purpose: subgraph isomorphism tries every
permutation in lexicographic order, satisfiability every truth assignment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .compat import SolutionGrid
from .graph import Digraph, InvalidInstance, WeightedDigraph, pad_pattern
from .reductions import CNF

__all__ = [
    "Verdict",
    "SizeError",
    "check_embedding",
    "count_embeddings",
    "subgi_brute_force",
    "sat_brute_force",
    "evaluate_cnf",
    "tsp_brute_force",
    "DEFAULT_SUBGI_CAP",
    "DEFAULT_SAT_CAP",
]

DEFAULT_SUBGI_CAP = 9
DEFAULT_SAT_CAP = 24


class SizeError(ValueError):
    """Instance too large for exhaustive enumeration under the configured cap."""


@dataclass(frozen=True)
class Verdict:
    answer: Literal["YES", "NO"]
    witness: SolutionGrid | tuple[bool, ...] | None = None

    def __post_init__(self):
        if self.answer == "YES" and self.witness is None:
            raise ValueError("a YES verdict needs a witness")

    def __bool__(self) -> bool:
        return self.answer == "YES"


def check_embedding(input: Digraph, pattern: Digraph, grid: SolutionGrid) -> bool:
    """Every arc multiplicity of the pattern fits under its image in the input."""
    if input.n != pattern.n or grid.n != input.n:
        raise InvalidInstance("input, pattern and grid must have the same size")
    g, s, m = input.adj, pattern.adj, [v - 1 for v in grid.map]
    n = input.n
    return all(s[i][j] <= g[m[i]][m[j]] for i in range(n) for j in range(n))


def _padded(input: Digraph, pattern: Digraph, cap: int) -> Digraph:
    if input.n > cap:
        raise SizeError(f"input has {input.n} vertices, cap is {cap}")
    return pad_pattern(pattern, input.n)


def subgi_brute_force(input: Digraph, pattern: Digraph, cap: int = DEFAULT_SUBGI_CAP) -> Verdict:
    """Try all n! relabelings of the padded pattern; first hit in lexicographic order wins."""
    if pattern.n > input.n:
        return Verdict("NO")
    pattern = _padded(input, pattern, cap)
    for perm in itertools.permutations(range(1, input.n + 1)):
        grid = SolutionGrid(perm)
        if check_embedding(input, pattern, grid):
            return Verdict("YES", grid)
    return Verdict("NO")


def count_embeddings(input: Digraph, pattern: Digraph, cap: int = DEFAULT_SUBGI_CAP) -> int:
    """Number of permutations of the padded pattern passing :func:`check_embedding`."""
    if pattern.n > input.n:
        return 0
    pattern = _padded(input, pattern, cap)
    return sum(
        check_embedding(input, pattern, SolutionGrid(perm))
        for perm in itertools.permutations(range(1, input.n + 1))
    )


def evaluate_cnf(cnf: CNF, assignment: tuple[bool, ...]) -> bool:
    return all(
        any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause) for clause in cnf.clauses
    )


def sat_brute_force(cnf: CNF, cap: int = DEFAULT_SAT_CAP) -> Verdict:
    """Truth table in lexicographic order, False before True, variable 1 most significant."""
    if cnf.num_vars > cap:
        raise SizeError(f"{cnf.num_vars} variables, cap is {cap}")
    for bits in itertools.product((False, True), repeat=cnf.num_vars):
        if evaluate_cnf(cnf, bits):
            return Verdict("YES", bits)
    return Verdict("NO")


def tsp_brute_force(
    g: WeightedDigraph, cap: int = DEFAULT_SUBGI_CAP
) -> tuple[Fraction, tuple[int, ...]] | None:
    """Cheapest directed Hamiltonian cycle as (cost, tour starting at 1), or None."""
    if g.n > cap:
        raise SizeError(f"{g.n} vertices, cap is {cap}")
    best = None
    for rest in itertools.permutations(range(2, g.n + 1)):
        tour = (1,) + rest
        cost = Fraction(0)
        for a, b in zip(tour, tour[1:] + tour[:1]):
            w = g.w(a, b)
            if w is None:
                break
            cost += w
        else:
            if best is None or cost < best[0]:
                best = (cost, tour)
    return best
