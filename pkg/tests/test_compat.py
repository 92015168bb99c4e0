import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from subiso.compat import (
    CompatMatrix,
    SolutionGrid,
    build_compat,
    enumerate_grids,
    grid_to_compat,
    propagate,
)
from subiso.graph import Digraph, InvalidInstance, pad_pattern, random_digraph
from subiso.oracle import check_embedding, count_embeddings

from .strategies import digraphs

# box layout: row (i, mu), column (j, nu)
CYCLE_VS_EDGE = [
    [1, 0, 0, 0, 0, 0, 0, 1, 1],
    [0, 1, 0, 0, 0, 0, 1, 0, 1],
    [0, 0, 1, 0, 0, 0, 1, 1, 0],
    [0, 0, 0, 1, 0, 0, 0, 1, 1],
    [0, 0, 0, 0, 1, 0, 1, 0, 1],
    [0, 0, 0, 0, 0, 1, 1, 1, 0],
    [0, 1, 1, 0, 1, 1, 1, 0, 0],
    [1, 0, 1, 1, 0, 1, 0, 1, 0],
    [1, 1, 0, 1, 1, 0, 0, 0, 1],
]

CYCLE_VS_PATH = [
    [1, 0, 0, 0, 1, 0, 0, 1, 1],
    [0, 1, 0, 0, 0, 1, 1, 0, 1],
    [0, 0, 1, 1, 0, 0, 1, 1, 0],
    [0, 0, 1, 1, 0, 0, 0, 1, 0],
    [1, 0, 0, 0, 1, 0, 0, 0, 1],
    [0, 1, 0, 0, 0, 1, 1, 0, 0],
    [0, 1, 1, 0, 0, 1, 1, 0, 0],
    [1, 0, 1, 1, 0, 0, 0, 1, 0],
    [1, 1, 0, 0, 1, 0, 0, 0, 1],
]

_C4_VS_C3_TEXT = """
1000 0100 0001 0111
0100 0010 1000 1011
0010 0001 0100 1101
0001 1000 0010 1110
0001 1000 0100 0111
1000 0100 0010 1011
0100 0010 0001 1101
0010 0001 1000 1110
0100 0001 1000 0111
0010 1000 0100 1011
0001 0100 0010 1101
1000 0010 0001 1110
0111 0111 0111 1000
1011 1011 1011 0100
1101 1101 1101 0010
1110 1110 1110 0001
"""

# hand-depleted version of the matrix above (fourth box row and column trimmed)
_C4_VS_C3_DEPLETED_TEXT = """
1000 0100 0001 0010
0100 0010 1000 0001
0010 0001 0100 1000
0001 1000 0010 0100
0001 1000 0100 0010
1000 0100 0010 0001
0100 0010 0001 1000
0010 0001 1000 0100
0100 0001 1000 0010
0010 1000 0100 0001
0001 0100 0010 1000
1000 0010 0001 0100
0010 0010 0010 1000
0001 0001 0001 0100
1000 1000 1000 0010
0100 0100 0100 0001
"""


def _matrix(text):
    return [[int(ch) for ch in line.replace(" ", "")] for line in text.split("\n") if line.strip()]


def test_cycle_vs_edge_matrix(c3):
    edge = pad_pattern(Digraph.from_arcs(2, [(1, 2), (2, 1)]), 3)
    c = build_compat(c3, edge)
    assert c.block_matrix() == CYCLE_VS_EDGE
    assert c.box(1, 2) == [[0] * 3] * 3
    assert enumerate_grids(c) == []


def test_cycle_vs_path_matrix(c3):
    path = Digraph.from_arcs(3, [(1, 2), (2, 3)])
    c = build_compat(c3, path)
    assert c.block_matrix() == CYCLE_VS_PATH
    assert enumerate_grids(c) == [SolutionGrid((1, 2, 3)), SolutionGrid((2, 3, 1)), SolutionGrid((3, 1, 2))]


def test_cycle_vs_cycle_matrix(c3, c4):
    c = build_compat(c4, pad_pattern(c3, 4))
    assert c.block_matrix() == _matrix(_C4_VS_C3_TEXT)
    assert enumerate_grids(c) == []


def test_empty_graphs_allow_everything():
    c = build_compat(Digraph.empty(2), Digraph.empty(2))
    for i, j, mu, nu in itertools.product(range(1, 3), repeat=4):
        structural_zero = (i == j) != (mu == nu)
        assert c(i, j, mu, nu) == (not structural_zero)
    assert list(c.zero_entries()) == []
    assert enumerate_grids(c) == [SolutionGrid((1, 2)), SolutionGrid((2, 1))]


def test_dimension_mismatch():
    with pytest.raises(InvalidInstance):
        build_compat(Digraph.empty(3), Digraph.empty(2))


@given(st.data())
def test_invariants_hold(data):
    g = data.draw(digraphs(max_n=4))
    s = data.draw(digraphs(min_n=g.n, max_n=g.n))
    c = build_compat(g, s)
    n = g.n
    for i, j, mu, nu in itertools.product(range(1, n + 1), repeat=4):
        assert c(i, j, mu, nu) == c(j, i, nu, mu)
        if i == j and mu != nu:
            assert not c(i, j, mu, nu)
        if i != j and mu == nu:
            assert not c(i, j, mu, nu)
    assert CompatMatrix.from_block_matrix(c.block_matrix()) == c


def test_invariant_violations_are_rejected():
    m = [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]]
    CompatMatrix.from_block_matrix(m)
    bad_diag = [row[:] for row in m]
    bad_diag[0][1] = 1
    with pytest.raises(ValueError):
        CompatMatrix.from_block_matrix(bad_diag)
    bad_off = [row[:] for row in m]
    bad_off[0][2] = 1
    with pytest.raises(ValueError):
        CompatMatrix.from_block_matrix(bad_off)
    asym = [row[:] for row in m]
    asym[0][3] = 0
    with pytest.raises(ValueError):
        CompatMatrix.from_block_matrix(asym)


@given(st.data())
def test_monotone_in_input(data):
    g = data.draw(digraphs(max_n=3))
    s = data.draw(digraphs(min_n=g.n, max_n=g.n))
    u = data.draw(st.integers(0, g.n - 1))
    v = data.draw(st.integers(0, g.n - 1))
    bigger = [list(row) for row in g.adj]
    bigger[u][v] += 1
    assert build_compat(g, s) <= build_compat(Digraph(g.n, bigger), s)


@given(st.data())
def test_grid_count_matches_permutation_count(data):
    g = data.draw(digraphs(max_n=5, max_mult=1))
    s = data.draw(digraphs(max_n=g.n, max_mult=1))
    grids = enumerate_grids(build_compat(g, pad_pattern(s, g.n)))
    assert len(grids) == count_embeddings(g, s)
    padded = pad_pattern(s, g.n)
    assert all(check_embedding(g, padded, grid) for grid in grids)
    assert [grid.map for grid in grids] == sorted(grid.map for grid in grids)


def test_enumerate_limit_and_large_n():
    c = build_compat(Digraph.empty(4), Digraph.empty(4))
    assert len(enumerate_grids(c)) == 24
    assert enumerate_grids(c, limit=5) == enumerate_grids(c)[:5]
    big = build_compat(Digraph.empty(9), Digraph.empty(9))
    with pytest.raises(ValueError):
        enumerate_grids(big)
    assert len(enumerate_grids(big, limit=3)) == 3


def test_solution_grid_rejects_non_injective():
    with pytest.raises(ValueError):
        SolutionGrid((1, 1))
    assert SolutionGrid((2, 1))[1] == 2


def test_propagate_cycle_vs_cycle(c3, c4):
    c = build_compat(c4, pad_pattern(c3, 4))
    depleted = CompatMatrix.from_block_matrix(_matrix(_C4_VS_C3_DEPLETED_TEXT))
    assert depleted <= c
    assert enumerate_grids(depleted) == []
    p = propagate(c)
    # the hand depletion is a stage on the way to the path-consistent fixed point
    assert p <= depleted
    assert propagate(depleted) == p
    assert enumerate_grids(p) == []


def test_propagate_all_zero_box_spreads(c3):
    c = build_compat(c3, pad_pattern(Digraph.from_arcs(2, [(1, 2), (2, 1)]), 3))
    p = propagate(c)
    assert p <= c
    zero_boxes = sum(
        all(not any(row) for row in p.box(i, j)) for i in range(1, 4) for j in range(1, 4)
    )
    assert zero_boxes > 1


def test_propagate_fixes_single_grid():
    for perm in itertools.permutations(range(1, 5)):
        c = grid_to_compat(SolutionGrid(perm))
        assert propagate(c) == c
        assert enumerate_grids(c) == [SolutionGrid(perm)]


@given(st.data())
def test_propagate_idempotent_and_grid_preserving(data):
    g = data.draw(digraphs(max_n=4, max_mult=1))
    s = data.draw(digraphs(max_n=g.n, max_mult=1))
    c = build_compat(g, pad_pattern(s, g.n))
    p = propagate(c)
    assert p <= c
    assert propagate(p) == p
    assert enumerate_grids(p) == enumerate_grids(c)


def test_render_shows_boxes():
    c = build_compat(Digraph.from_arcs(2, [(1, 2)]), Digraph.from_arcs(2, [(2, 1)]))
    text = c.render()
    assert text.count("\n") >= 3
    assert "|" in text


def test_random_instances_share_grids_with_oracle():
    for seed in range(30):
        g = random_digraph(4, "1/2", 1, seed)
        s = random_digraph(4, "1/4", 1, seed + 1000)
        assert len(enumerate_grids(build_compat(g, s))) == count_embeddings(g, s)
