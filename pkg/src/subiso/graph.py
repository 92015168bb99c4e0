"""Multi-digraphs over 1-indexed vertices, their text format, and seeded generation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "Digraph",
    "WeightedDigraph",
    "ParseError",
    "InvalidInstance",
    "SplitMix64",
    "parse_digraph",
    "serialize_digraph",
    "parse_weighted_digraph",
    "serialize_weighted_digraph",
    "pad_pattern",
    "relabel",
    "random_digraph",
    "random_weighted_digraph",
    "check_permutation",
]


class ParseError(ValueError):
    """Malformed input text. ``line`` is the 1-based offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InvalidInstance(ValueError):
    pass


@dataclass(frozen=True)
class Digraph:
    """Square matrix of arc multiplicities; ``adj[u][v]`` counts arcs u->v (0-based storage)."""

    n: int
    adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInstance("digraph needs at least one vertex")
        adj = tuple(tuple(int(a) for a in row) for row in self.adj)
        if len(adj) != self.n or any(len(row) != self.n for row in adj):
            raise InvalidInstance(f"adjacency matrix is not {self.n}x{self.n}")
        if any(a < 0 for row in adj for a in row):
            raise InvalidInstance("negative arc multiplicity")
        object.__setattr__(self, "adj", adj)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> Digraph:
        """Build from 1-indexed ``(u, v)`` pairs; repeated pairs add up."""
        m = [[0] * n for _ in range(n)]
        for u, v in arcs:
            m[u - 1][v - 1] += 1
        return cls(n, m)

    @classmethod
    def empty(cls, n: int) -> Digraph:
        return cls(n, [[0] * n for _ in range(n)])

    def arc(self, u: int, v: int) -> int:
        """Multiplicity of u->v with 1-indexed vertices."""
        return self.adj[u - 1][v - 1]

    def arcs(self) -> list[tuple[int, int, int]]:
        return [
            (u + 1, v + 1, m)
            for u, row in enumerate(self.adj)
            for v, m in enumerate(row)
            if m
        ]

    def __str__(self) -> str:
        return serialize_digraph(self)


@dataclass(frozen=True)
class WeightedDigraph:
    """Arc weights as exact rationals; ``None`` marks an absent arc."""

    n: int
    weight: tuple[tuple[Fraction | None, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInstance("digraph needs at least one vertex")
        w = tuple(
            tuple(None if x is None else Fraction(x) for x in row) for row in self.weight
        )
        if len(w) != self.n or any(len(row) != self.n for row in w):
            raise InvalidInstance(f"weight matrix is not {self.n}x{self.n}")
        object.__setattr__(self, "weight", w)

    def w(self, u: int, v: int) -> Fraction | None:
        return self.weight[u - 1][v - 1]

    def support(self) -> Digraph:
        """The plain digraph with one arc wherever a weight is present."""
        return Digraph(
            self.n, [[0 if x is None else 1 for x in row] for row in self.weight]
        )


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_header(text: str, keyword: str):
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError(1, f"missing '{keyword} <n>' header")
    lineno, tokens = lines[0]
    if len(tokens) != 2 or tokens[0] != keyword:
        raise ParseError(lineno, f"expected '{keyword} <n>' header")
    try:
        n = int(tokens[1])
    except ValueError:
        raise ParseError(lineno, f"bad vertex count {tokens[1]!r}") from None
    if n < 1:
        raise ParseError(lineno, "vertex count must be positive")
    return n, lines[1:]


def _parse_vertex(tok: str, n: int, lineno: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(lineno, f"bad vertex {tok!r}") from None
    if not 1 <= v <= n:
        raise ParseError(lineno, f"vertex {v} out of range [1,{n}]")
    return v


def parse_digraph(text: str) -> Digraph:
    """Parse ``digraph <n>`` followed by ``<u> <v> [mult]`` lines.

    Blank lines and ``#`` comments are skipped; repeated arcs accumulate.

    >>> parse_digraph("digraph 2\\n1 2").adj
    ((0, 1), (0, 0))
    """
    n, body = _parse_header(text, "digraph")
    m = [[0] * n for _ in range(n)]
    for lineno, tokens in body:
        if len(tokens) not in (2, 3):
            raise ParseError(lineno, "expected '<u> <v> [mult]'")
        u = _parse_vertex(tokens[0], n, lineno)
        v = _parse_vertex(tokens[1], n, lineno)
        mult = 1
        if len(tokens) == 3:
            try:
                mult = int(tokens[2])
            except ValueError:
                raise ParseError(lineno, f"bad multiplicity {tokens[2]!r}") from None
            if mult < 0:
                raise ParseError(lineno, "negative multiplicity")
        m[u - 1][v - 1] += mult
    return Digraph(n, m)


def serialize_digraph(d: Digraph) -> str:
    lines = [f"digraph {d.n}"]
    for u, v, mult in d.arcs():
        lines.append(f"{u} {v}" if mult == 1 else f"{u} {v} {mult}")
    return "\n".join(lines) + "\n"


def parse_weighted_digraph(text: str) -> WeightedDigraph:
    """Parse ``wdigraph <n>`` followed by ``<u> <v> <weight>`` lines.

    Weights are integers or ``p/q`` rationals and may be negative. Pairs that
    never appear are absent arcs. A pair may be given at most once.
    """
    n, body = _parse_header(text, "wdigraph")
    w: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    for lineno, tokens in body:
        if len(tokens) != 3:
            raise ParseError(lineno, "expected '<u> <v> <weight>'")
        u = _parse_vertex(tokens[0], n, lineno)
        v = _parse_vertex(tokens[1], n, lineno)
        try:
            weight = Fraction(tokens[2])
        except (ValueError, ZeroDivisionError):
            raise ParseError(lineno, f"bad weight {tokens[2]!r}") from None
        if w[u - 1][v - 1] is not None:
            raise ParseError(lineno, f"duplicate arc {u} {v}")
        w[u - 1][v - 1] = weight
    return WeightedDigraph(n, w)


def serialize_weighted_digraph(g: WeightedDigraph) -> str:
    lines = [f"wdigraph {g.n}"]
    for u in range(1, g.n + 1):
        for v in range(1, g.n + 1):
            x = g.w(u, v)
            if x is not None:
                lines.append(f"{u} {v} {x}")
    return "\n".join(lines) + "\n"


def pad_pattern(pattern: Digraph, target_n: int) -> Digraph:
    """Append isolated vertices so the pattern has ``target_n`` vertices."""
    if target_n < pattern.n:
        raise InvalidInstance(
            f"pattern has {pattern.n} vertices, more than the target {target_n}"
        )
    extra = target_n - pattern.n
    rows = [list(row) + [0] * extra for row in pattern.adj]
    rows += [[0] * target_n for _ in range(extra)]
    return Digraph(target_n, rows)


def check_permutation(perm: Sequence[int], n: int) -> tuple[int, ...]:
    """Validate a 1-indexed bijection on [1..n] given as ``perm[k-1] = image of k``."""
    perm = tuple(perm)
    if len(perm) != n or sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {perm}")
    return perm


def relabel(d: Digraph, perm: Sequence[int]) -> Digraph:
    """Rename vertex u to ``perm[u-1]``: the arc u->v becomes perm(u)->perm(v)."""
    perm = check_permutation(perm, d.n)
    m = [[0] * d.n for _ in range(d.n)]
    for u in range(d.n):
        for v in range(d.n):
            m[perm[u] - 1][perm[v] - 1] = d.adj[u][v]
    return Digraph(d.n, m)


class SplitMix64:
    """SplitMix64 (Steele, Lea, Flood 2014). Portable and trivially reimplemented.

    Every random choice in the package flows through :meth:`next_u64`, so a
    seed reproduces the same instances in any language that implements the
    same three-line mixer.
    """

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self._MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self._MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def bernoulli(self, p: Fraction) -> bool:
        """True with probability exactly ``p`` up to 2**-64 granularity."""
        p = Fraction(p)
        return self.next_u64() * p.denominator < p.numerator << 64

    def below(self, k: int) -> int:
        """Integer in [0, k) by modular reduction (bias < k / 2**64)."""
        return self.next_u64() % k

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of 1..n."""
        p = list(range(1, n + 1))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            p[i], p[j] = p[j], p[i]
        return p


def random_digraph(
    n: int, arc_probability: Fraction | int | str, max_multiplicity: int, seed: int
) -> Digraph:
    """Seeded random multi-digraph, loops included.

    Ordered pairs are visited row-major (u, then v). Each pair draws one
    value for the arc test and, only when an arc is placed and
    ``max_multiplicity > 1``, a second value for the multiplicity.
    """
    p = Fraction(arc_probability)
    if n < 1 or not 0 <= p <= 1 or max_multiplicity < 1:
        raise ValueError("need n >= 1, 0 <= p <= 1, max_multiplicity >= 1")
    rng = SplitMix64(seed)
    return _random_digraph(rng, n, p, max_multiplicity)


def _random_digraph(rng: SplitMix64, n: int, p: Fraction, max_mult: int) -> Digraph:
    m = [[0] * n for _ in range(n)]
    for u in range(n):
        for v in range(n):
            if rng.bernoulli(p):
                m[u][v] = 1 + rng.below(max_mult) if max_mult > 1 else 1
    return Digraph(n, m)


def random_weighted_digraph(
    n: int, arc_probability: Fraction | int | str, weight_range: tuple[int, int], seed: int
) -> WeightedDigraph:
    """Seeded loopless weighted digraph with integer weights in ``weight_range`` (inclusive).

    Pairs u != v are visited row-major; each draws an arc test and, if placed,
    a weight.
    """
    p = Fraction(arc_probability)
    lo, hi = weight_range
    if n < 1 or not 0 <= p <= 1 or lo > hi:
        raise ValueError("need n >= 1, 0 <= p <= 1 and a nonempty weight range")
    rng = SplitMix64(seed)
    w: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    for u in range(n):
        for v in range(n):
            if u != v and rng.bernoulli(p):
                w[u][v] = Fraction(lo + rng.below(hi - lo + 1))
    return WeightedDigraph(n, w)
