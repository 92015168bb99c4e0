"""TSP and SAT expressed through the subgraph isomorphism model.

TSP objective normalisation
---------------------------
The pattern is the directed n-cycle 1->2->...->n->1. The canonical variable
X(i, j, mu, nu) with i < j stands for both oriented readings (i, j, mu, nu)
and (j, i, nu, mu). Its objective coefficient is::

    w(mu, nu) * [pattern has arc i->j]  +  w(nu, mu) * [pattern has arc j->i]

At the 0/1 point of a solution grid this charges every tour arc exactly once,
so the objective equals the tour cost (normalisation constant 1). Absent
weights never enter the objective: the matching compatibility entry is 0 and
the variable is pinned to zero.

SAT reduction
-------------
One vertex per literal occurrence, numbered clause-major. Input arcs join
every ordered pair of slots except complementary literals (x and not-x);
the rule is applied uniformly, inside a clause too, and every slot keeps its
loop. The pattern links the first slot of every clause to the first slot of
every clause, loops included; other slots are isolated. All pattern slots
of clause i are confined to the input slots of clause i by pinning the
y variables that would move them out.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .compat import build_compat
from .graph import Digraph, ParseError, SplitMix64, WeightedDigraph
from .model import LinearSystem, Var, X, Y, aggregate, build_base_system, zero_constraints

__all__ = [
    "CNF",
    "SatInstance",
    "parse_cnf",
    "serialize_cnf",
    "random_cnf",
    "all_cnfs",
    "hamiltonian_pattern",
    "tsp_model",
    "sat_to_subgi",
]


@dataclass(frozen=True)
class CNF:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for c in clauses:
            if not c:
                raise ValueError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range for {self.num_vars} variables")
        object.__setattr__(self, "clauses", clauses)

    def __str__(self) -> str:
        return " & ".join(
            "(" + " | ".join(f"x{l}" if l > 0 else f"~x{-l}" for l in c) + ")"
            for c in self.clauses
        )


def parse_cnf(text: str) -> CNF:
    """DIMACS CNF: ``c`` comments, a ``p cnf V C`` header, 0-terminated clauses.

    >>> parse_cnf("p cnf 2 1\\n1 -2 0").clauses
    ((1, -2),)
    """
    header = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        last_line = lineno
        if line.startswith("p"):
            tokens = line.split()
            if header is not None or len(tokens) != 4 or tokens[1] != "cnf":
                raise ParseError(lineno, "expected a single 'p cnf <vars> <clauses>' header")
            try:
                header = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise ParseError(lineno, "non-integer header field") from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError(lineno, "negative header field")
            continue
        if header is None:
            raise ParseError(lineno, "clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(lineno, f"bad literal {tok!r}") from None
            if lit == 0:
                if not current:
                    raise ParseError(lineno, "zero-length clause")
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise ParseError(lineno, f"variable {abs(lit)} out of range [1,{header[0]}]")
            else:
                current.append(lit)
    if header is None:
        raise ParseError(max(last_line, 1), "missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))
    if len(clauses) != header[1]:
        raise ParseError(
            last_line, f"header declares {header[1]} clauses, found {len(clauses)}"
        )
    return CNF(header[0], tuple(clauses))


def serialize_cnf(cnf: CNF) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def random_cnf(max_vars: int, max_clauses: int, max_width: int, seed: int) -> CNF:
    """Seeded CNF: variable count, clause count and widths uniform in their ranges.

    Each clause draws distinct variables (width capped at the variable count)
    and an independent sign per literal.
    """
    rng = SplitMix64(seed)
    nv = 1 + rng.below(max_vars)
    nc = 1 + rng.below(max_clauses)
    clauses = []
    for _ in range(nc):
        width = 1 + rng.below(min(max_width, nv))
        pool = list(range(1, nv + 1))
        lits = []
        for _ in range(width):
            v = pool.pop(rng.below(len(pool)))
            lits.append(v if rng.below(2) else -v)
        clauses.append(tuple(lits))
    return CNF(nv, tuple(clauses))


def all_cnfs(max_vars: int, max_clauses: int):
    """Every CNF whose clauses are nonempty literal sets over at most ``max_vars`` variables."""
    for nv in range(1, max_vars + 1):
        lits = [l for v in range(1, nv + 1) for l in (v, -v)]
        subsets = [
            c for w in range(1, len(lits) + 1) for c in itertools.combinations(lits, w)
        ]
        for m in range(1, max_clauses + 1):
            for clauses in itertools.product(subsets, repeat=m):
                yield CNF(nv, clauses)


def hamiltonian_pattern(n: int) -> Digraph:
    """The directed cycle 1->2->...->n->1."""
    if n < 2:
        raise ValueError("a Hamiltonian cycle pattern needs n >= 2")
    return Digraph.from_arcs(n, [(k, k % n + 1) for k in range(1, n + 1)])


def tsp_model(g: WeightedDigraph) -> tuple[LinearSystem, dict[Var, Fraction]]:
    """Aggregated system for ``g`` against the n-cycle, and the tour-cost objective."""
    if g.n < 2:
        raise ValueError("TSP needs at least two vertices")
    n = g.n
    pattern = hamiltonian_pattern(n)
    sys = aggregate(build_base_system(n), zero_constraints(build_compat(g.support(), pattern)))
    objective: dict[Var, Fraction] = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j or not pattern.arc(i, j):
                continue
            for mu in range(1, n + 1):
                for nu in range(1, n + 1):
                    w = g.w(mu, nu)
                    if mu == nu or w is None:
                        continue
                    v = X(i, j, mu, nu)
                    objective[v] = objective.get(v, Fraction(0)) + w
    return sys, {v: c for v, c in objective.items() if c}


@dataclass(frozen=True)
class SatInstance:
    cnf: CNF
    input: Digraph
    pattern: Digraph
    extra_zeros: frozenset[Var]
    blocks: tuple[range, ...]

    def system(self) -> LinearSystem:
        zeros = zero_constraints(build_compat(self.input, self.pattern))
        return aggregate(build_base_system(self.input.n), zeros, self.extra_zeros)

    def slot(self, p: int) -> tuple[int, int]:
        """(clause, position) of 1-based vertex ``p``, both 1-based."""
        for i, block in enumerate(self.blocks, start=1):
            if p in block:
                return i, p - block.start + 1
        raise IndexError(p)


def sat_to_subgi(f: CNF) -> SatInstance:
    lits = [lit for clause in f.clauses for lit in clause]
    n = len(lits)
    blocks = []
    start = 1
    for clause in f.clauses:
        blocks.append(range(start, start + len(clause)))
        start += len(clause)
    g = [[0 if lits[p] == -lits[q] else 1 for q in range(n)] for p in range(n)]
    firsts = [b.start for b in blocks]
    pattern = Digraph.from_arcs(n, [(a, b) for a in firsts for b in firsts])
    extra = frozenset(
        Y(p, nu)
        for block in blocks
        for p in block
        for nu in range(1, n + 1)
        if nu not in block
    )
    return SatInstance(f, Digraph(n, g), pattern, extra, tuple(blocks))
