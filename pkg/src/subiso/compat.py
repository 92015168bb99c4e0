"""Compatibility matrices, solution grids and path-consistency depletion.

A compatibility matrix is stored as ``n*n*n`` row bitmasks: bit ``nu-1`` of
``rows[i-1][j-1][mu-1]`` is the entry e(i, j, mu, nu). Pattern vertices are
indexed by i, j and input vertices by mu, nu, all 1-based in the public API.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .graph import Digraph, InvalidInstance

__all__ = [
    "CompatMatrix",
    "SolutionGrid",
    "build_compat",
    "enumerate_grids",
    "propagate",
    "grid_to_compat",
    "GRID_LIMIT_FREE_MAX_N",
]

GRID_LIMIT_FREE_MAX_N = 8


@dataclass(frozen=True)
class SolutionGrid:
    """Pattern vertex j goes to input vertex ``map[j-1]``."""

    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        n = len(m)
        if len(set(m)) != n or any(not 1 <= v <= n for v in m):
            raise ValueError(f"grid is not injective on 1..{n}: {m}")
        object.__setattr__(self, "map", m)

    @property
    def n(self) -> int:
        return len(self.map)

    def __getitem__(self, j: int) -> int:
        return self.map[j - 1]


class CompatMatrix:
    """Immutable n^2 x n^2 boolean box matrix with symmetric box structure."""

    __slots__ = ("n", "_rows")

    def __init__(self, n: int, rows: Sequence[Sequence[Sequence[int]]]):
        self.n = n
        self._rows = tuple(tuple(tuple(r) for r in box_row) for box_row in rows)
        self._validate()

    def _validate(self):
        n, rows = self.n, self._rows
        full = (1 << n) - 1
        if len(rows) != n or any(len(b) != n or any(len(r) != n for r in b) for b in rows):
            raise ValueError("compatibility table has the wrong shape")
        for i in range(n):
            for j in range(n):
                for mu in range(n):
                    mask = rows[i][j][mu]
                    if mask & ~full:
                        raise ValueError("entry outside 1..n")
                    if i == j and mask & ~(1 << mu):
                        raise ValueError(f"diagonal box {i + 1} is not diagonal")
                    if i != j and mask & (1 << mu):
                        raise ValueError(f"box ({i + 1},{j + 1}) has a nonzero diagonal")
                    for nu in range(n):
                        if bool(mask >> nu & 1) != bool(rows[j][i][nu] >> mu & 1):
                            raise ValueError("compatibility table is not symmetric")

    @classmethod
    def from_entries(cls, n: int, e) -> CompatMatrix:
        """Build from a callable or nested 1-based sequence ``e(i, j, mu, nu)``."""
        get = e if callable(e) else (lambda i, j, mu, nu: e[i - 1][j - 1][mu - 1][nu - 1])
        rows = [
            [
                [
                    sum(1 << (nu - 1) for nu in range(1, n + 1) if get(i, j, mu, nu))
                    for mu in range(1, n + 1)
                ]
                for j in range(1, n + 1)
            ]
            for i in range(1, n + 1)
        ]
        return cls(n, rows)

    @classmethod
    def from_block_matrix(cls, matrix: Sequence[Sequence[int]]) -> CompatMatrix:
        """Build from the flat n^2 x n^2 layout: row (i, mu), column (j, nu)."""
        size = len(matrix)
        n = round(size ** 0.5)
        if n * n != size:
            raise ValueError("block matrix side is not a perfect square")
        return cls.from_entries(
            n, lambda i, j, mu, nu: matrix[(i - 1) * n + mu - 1][(j - 1) * n + nu - 1]
        )

    def __call__(self, i: int, j: int, mu: int, nu: int) -> bool:
        return bool(self._rows[i - 1][j - 1][mu - 1] >> (nu - 1) & 1)

    def row_mask(self, i: int, j: int, mu: int) -> int:
        return self._rows[i - 1][j - 1][mu - 1]

    @property
    def masks(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """Raw 0-based bitmask table."""
        return self._rows

    def box(self, i: int, j: int) -> list[list[int]]:
        n = self.n
        return [[int(self(i, j, mu, nu)) for nu in range(1, n + 1)] for mu in range(1, n + 1)]

    def block_matrix(self) -> list[list[int]]:
        n = self.n
        return [
            [int(self(i, j, mu, nu)) for j in range(1, n + 1) for nu in range(1, n + 1)]
            for i in range(1, n + 1)
            for mu in range(1, n + 1)
        ]

    def zero_entries(self) -> Iterator[tuple[int, int, int, int]]:
        """Zero entries that are not structural zeros, 1-based, lexicographic."""
        n = self.n
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                for mu in range(1, n + 1):
                    for nu in range(1, n + 1):
                        if (i == j) != (mu == nu):
                            continue
                        if not self(i, j, mu, nu):
                            yield i, j, mu, nu

    def count(self) -> int:
        return sum(bin(m).count("1") for b in self._rows for r in b for m in r)

    def __le__(self, other: CompatMatrix) -> bool:
        return self.n == other.n and all(
            a & ~b == 0
            for ba, bb in zip(self._rows, other._rows)
            for ra, rb in zip(ba, bb)
            for a, b in zip(ra, rb)
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, CompatMatrix) and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def render(self) -> str:
        """Box layout with ``|`` between box columns and rules between box rows."""
        n = self.n
        bm = self.block_matrix()
        rule = "+" + "+".join(["-" * (2 * n + 1)] * n) + "+"
        out = [rule]
        for i in range(n):
            for mu in range(n):
                row = bm[i * n + mu]
                cells = [" ".join(str(v) for v in row[j * n:(j + 1) * n]) for j in range(n)]
                out.append("| " + " | ".join(cells) + " |")
            out.append(rule)
        return "\n".join(out)

    def __repr__(self) -> str:
        return f"CompatMatrix(n={self.n}, ones={self.count()})"


def build_compat(input: Digraph, pattern: Digraph) -> CompatMatrix:
    """Entry (i, j, mu, nu) is 1 iff mapping i->mu, j->nu keeps both arc directions.

    Only slots with i == j and mu == nu, or i != j and mu != nu, are ever set;
    the rest are structural zeros.
    """
    if input.n != pattern.n:
        raise InvalidInstance(
            f"input has {input.n} vertices, pattern {pattern.n}; pad the pattern first"
        )
    n = input.n
    g, s = input.adj, pattern.adj
    rows = []
    for i in range(n):
        box_row = []
        for j in range(n):
            masks = []
            for mu in range(n):
                mask = 0
                if i == j:
                    if s[i][i] <= g[mu][mu]:
                        mask = 1 << mu
                else:
                    for nu in range(n):
                        if nu != mu and s[i][j] <= g[mu][nu] and s[j][i] <= g[nu][mu]:
                            mask |= 1 << nu
                masks.append(mask)
            box_row.append(masks)
        rows.append(box_row)
    return CompatMatrix(n, rows)


def enumerate_grids(c: CompatMatrix, limit: int | None = None) -> list[SolutionGrid]:
    """All solution grids in lexicographic order of their vertex maps.

    Backtracks over pattern vertices 1..n, extending a partial map only
    with input vertices compatible with every vertex already placed.
    """
    n = c.n
    if limit is None and n > GRID_LIMIT_FREE_MAX_N:
        raise ValueError(f"limit is required for n > {GRID_LIMIT_FREE_MAX_N}")
    rows = c.masks
    found: list[SolutionGrid] = []
    assign: list[int] = []

    def extend(j: int, used: int) -> bool:
        if j == n:
            found.append(SolutionGrid(tuple(v + 1 for v in assign)))
            return limit is not None and len(found) >= limit
        # candidates for j: self-compatible, unused, compatible with all placed
        cand = 0
        for nu in range(n):
            if rows[j][j][nu] >> nu & 1:
                cand |= 1 << nu
        cand &= ~used
        for i, mu in enumerate(assign):
            cand &= rows[i][j][mu]
        for nu in range(n):
            if cand >> nu & 1:
                assign.append(nu)
                if extend(j + 1, used | 1 << nu):
                    return True
                assign.pop()
        return False

    if limit is None or limit > 0:
        extend(0, 0)
    return found


def propagate(c: CompatMatrix) -> CompatMatrix:
    """Path-consistency closure of the compatibility table.

    An entry (i, j, mu, nu) survives only if, for every pattern vertex k,
    some input vertex lam has both (i, k, mu, lam) and (k, j, lam, nu) set.
    By symmetry the second entry equals (j, k, nu, lam), so the test is a
    bitmask intersection of two rows. Iterates to a fixed point; every
    solution grid of ``c`` survives.
    """
    n = c.n
    rows = [[list(r) for r in b] for b in c.masks]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                for mu in range(n):
                    mask = rows[i][j][mu]
                    nu_bits = mask
                    while nu_bits:
                        low = nu_bits & -nu_bits
                        nu = low.bit_length() - 1
                        nu_bits ^= low
                        for k in range(n):
                            if not rows[i][k][mu] & rows[j][k][nu]:
                                rows[i][j][mu] &= ~low
                                rows[j][i][nu] &= ~(1 << mu)
                                changed = True
                                break
    return CompatMatrix(n, rows)


def grid_to_compat(grid: SolutionGrid) -> CompatMatrix:
    """The compatibility table whose only ones are the entries of ``grid``."""
    n = grid.n
    return CompatMatrix.from_entries(
        n, lambda i, j, mu, nu: grid[i] == mu and grid[j] == nu
    )
