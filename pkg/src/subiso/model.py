"""The base linear system, zero constraints from a compatibility matrix, and LP text output.

Variables live in an n x n box matrix. Box (j, j) is diagonal and holds
``y[j, nu]``; off-diagonal box (i, j) holds ``x[i, j, mu, nu]`` for mu != nu.
Since x[i, j, mu, nu] and x[j, i, nu, mu] are the same unknown, only the
orientation with i < j gets a variable (see :func:`X`).

Variable order: all y in (j, nu) order, then all x in (i, j, mu, nu) order.
Row order: the n^2(n-1) box-column sums (i, j, nu), then the n^2(n-1)
column-over-boxes sums (j, mu, nu), then the n normalisation rows (j).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .compat import CompatMatrix, SolutionGrid

__all__ = [
    "Var",
    "X",
    "Y",
    "Row",
    "LinearSystem",
    "Assignment",
    "build_base_system",
    "zero_constraints",
    "aggregate",
    "center_point",
    "grid_to_point",
    "check_assignment",
    "point_to_grid",
    "emit_lp",
    "variable_count",
    "equality_count",
]


class Var(NamedTuple):
    """A model unknown. For y variables ``i == j`` and ``mu == nu``."""

    kind: str
    i: int
    j: int
    mu: int
    nu: int

    @property
    def name(self) -> str:
        if self.kind == "y":
            return f"y_{self.j}_{self.nu}"
        return f"x_{self.i}_{self.j}_{self.mu}_{self.nu}"

    def __str__(self) -> str:
        return self.name


def X(i: int, j: int, mu: int, nu: int) -> Var:
    """The x variable for (i, j, mu, nu), resolved to its canonical orientation."""
    if i == j or mu == nu:
        raise ValueError(f"x needs i != j and mu != nu, got ({i},{j},{mu},{nu})")
    if i > j:
        i, j, mu, nu = j, i, nu, mu
    return Var("x", i, j, mu, nu)


def Y(j: int, nu: int) -> Var:
    return Var("y", j, j, nu, nu)


Assignment = dict  # Var -> Fraction


@dataclass(frozen=True)
class Row:
    """``sum(coef * var) == rhs``."""

    coeffs: tuple[tuple[Var, Fraction], ...]
    rhs: Fraction

    def evaluate(self, point: Mapping[Var, Fraction]) -> Fraction:
        return sum((c * point.get(v, 0) for v, c in self.coeffs), Fraction(0))


@dataclass(frozen=True)
class LinearSystem:
    """Equalities over nonnegative variables, some of them pinned to zero."""

    n: int
    variables: tuple[Var, ...]
    equalities: tuple[Row, ...]
    zero_fixed: frozenset[Var] = frozenset()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: k for k, v in enumerate(self.variables)})
        for row in self.equalities:
            for v, _ in row.coeffs:
                if v not in self._index:
                    raise ValueError(f"row references unknown variable {v}")
        for v in self.zero_fixed:
            if v not in self._index:
                raise ValueError(f"zero-fixed variable {v} is not in the system")

    def index(self, v: Var) -> int:
        return self._index[v]

    def __contains__(self, v: Var) -> bool:
        return v in self._index


def variable_count(n: int) -> int:
    return n * n + n * n * (n - 1) ** 2 // 2


def equality_count(n: int) -> int:
    return 2 * n * n * (n - 1) + n


def _variables(n: int) -> tuple[Var, ...]:
    ys = [Y(j, nu) for j in range(1, n + 1) for nu in range(1, n + 1)]
    xs = [
        Var("x", i, j, mu, nu)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        for mu in range(1, n + 1)
        for nu in range(1, n + 1)
        if mu != nu
    ]
    return tuple(ys + xs)


def _row(terms: Iterable[tuple[Var, int]], rhs: int) -> Row:
    merged: dict[Var, Fraction] = {}
    for v, c in terms:
        merged[v] = merged.get(v, Fraction(0)) + c
    return Row(tuple((v, c) for v, c in merged.items() if c), Fraction(rhs))


@functools.lru_cache(maxsize=16)
def build_base_system(n: int) -> LinearSystem:
    """Box-column sums, column-over-boxes sums and unit y-blocks for size ``n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = range(1, n + 1)
    rows = []
    for i in rng:
        for j in rng:
            if i == j:
                continue
            for nu in rng:
                terms = [(X(i, j, mu, nu), 1) for mu in rng if mu != nu]
                rows.append(_row(terms + [(Y(j, nu), -1)], 0))
    for j in rng:
        for mu in rng:
            for nu in rng:
                if mu == nu:
                    continue
                terms = [(X(i, j, mu, nu), 1) for i in rng if i != j]
                rows.append(_row(terms + [(Y(j, nu), -1)], 0))
    for j in rng:
        rows.append(_row([(Y(j, nu), 1) for nu in rng], 1))
    return LinearSystem(n, _variables(n), tuple(rows))


def zero_constraints(c: CompatMatrix) -> frozenset[Var]:
    """Variables whose compatibility entry is 0 (structural zeros have no variable)."""
    out = set()
    for i, j, mu, nu in c.zero_entries():
        out.add(Y(j, nu) if i == j else X(i, j, mu, nu))
    return frozenset(out)


def aggregate(
    base: LinearSystem, zeros: Iterable[Var] = (), extra_zeros: Iterable[Var] = ()
) -> LinearSystem:
    """``base`` with additional variables pinned to zero."""
    fixed = set(base.zero_fixed) | set(zeros) | set(extra_zeros)
    for v in fixed:
        if v not in base:
            raise ValueError(f"{v} is not a variable of the size-{base.n} system")
    return LinearSystem(base.n, base.variables, base.equalities, frozenset(fixed))


def center_point(n: int) -> Assignment:
    """x = 1/(n(n-1)), y = 1/n; for n = 1 only y = 1 exists."""
    if n < 1:
        raise ValueError("n must be at least 1")
    y = Fraction(1, n)
    x = Fraction(1, n * (n - 1)) if n > 1 else None
    return {v: (y if v.kind == "y" else x) for v in _variables(n)}


def grid_to_point(grid: SolutionGrid, n: int | None = None) -> Assignment:
    """0/1 point with a single 1 per box, at the grid's entries."""
    n = grid.n if n is None else n
    if grid.n != n:
        raise ValueError(f"grid has size {grid.n}, expected {n}")
    point = {v: Fraction(0) for v in _variables(n)}
    for j in range(1, n + 1):
        point[Y(j, grid[j])] = Fraction(1)
        for i in range(1, n + 1):
            if i != j:
                point[X(i, j, grid[i], grid[j])] = Fraction(1)
    return point


def point_to_grid(point: Mapping[Var, Fraction], n: int) -> SolutionGrid | None:
    """The grid behind a 0/1 point with one unit y per box, else None."""
    if any(q not in (0, 1) for q in point.values()):
        return None
    image = []
    for j in range(1, n + 1):
        hits = [nu for nu in range(1, n + 1) if point.get(Y(j, nu)) == 1]
        if len(hits) != 1:
            return None
        image.append(hits[0])
    try:
        grid = SolutionGrid(tuple(image))
    except ValueError:
        return None
    return grid if dict(point) == grid_to_point(grid, n) else None


def check_assignment(sys: LinearSystem, point: Mapping[Var, Fraction]) -> bool:
    """Exact feasibility test: every equality, every pin, every sign."""
    if set(point) != set(sys.variables):
        return False
    if any(Fraction(val) < 0 for val in point.values()):
        return False
    if any(point[v] != 0 for v in sys.zero_fixed):
        return False
    return all(row.evaluate(point) == row.rhs for row in sys.equalities)


def _fmt_number(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d == 1:
        places = max(twos, fives)
        scaled = q.numerator * 10**places // q.denominator
        sign = "-" if scaled < 0 else ""
        digits = str(abs(scaled)).rjust(places + 1, "0")
        return f"{sign}{digits[:-places]}.{digits[-places:]}"
    # not representable exactly in decimal; LP text has no rational literal
    return repr(float(q))


def _fmt_terms(terms: list[tuple[Var, Fraction]], per_line: int = 8) -> list[str]:
    parts = []
    for k, (v, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = v.name if mag == 1 else f"{_fmt_number(mag)} {v.name}"
        parts.append(f"{sign} {body}" if k else (f"- {body}" if c < 0 else body))
    return [" ".join(parts[k:k + per_line]) for k in range(0, len(parts), per_line)]


def emit_lp(sys: LinearSystem, objective: Mapping[Var, Fraction] | None = None) -> str:
    """CPLEX-style LP text: Minimize / Subject To / Bounds / End.

    Variables are named ``x_i_j_mu_nu`` (canonical i < j) and ``y_j_nu``.
    Rows are named ``r1, r2, ...`` in system order; pinned variables get a
    ``= 0`` bound and every other variable an explicit ``>= 0``.
    """
    objective = dict(objective or {})
    for v in objective:
        if v not in sys:
            raise ValueError(f"objective references unknown variable {v}")
    lines = [f"\\ subgraph isomorphism model, n = {sys.n}", "Minimize"]
    obj_terms = [(v, Fraction(objective[v])) for v in sys.variables if objective.get(v)]
    if not obj_terms:
        lines.append(f" obj: 0 {sys.variables[0].name}")
    else:
        body = _fmt_terms(obj_terms)
        lines.append(" obj: " + body[0])
        lines.extend("   " + b for b in body[1:])
    lines.append("Subject To")
    for k, row in enumerate(sys.equalities, start=1):
        body = _fmt_terms(list(row.coeffs))
        if not body:
            body = [f"0 {sys.variables[0].name}"]
        body[-1] += f" = {_fmt_number(row.rhs)}"
        lines.append(f" r{k}: " + body[0])
        lines.extend("   " + b for b in body[1:])
    lines.append("Bounds")
    for v in sys.variables:
        lines.append(f" {v.name} = 0" if v in sys.zero_fixed else f" {v.name} >= 0")
    lines.append("End")
    return "\n".join(lines) + "\n"
