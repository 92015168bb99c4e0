import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from subiso.compat import build_compat, enumerate_grids
from subiso.graph import Digraph, ParseError, WeightedDigraph, random_weighted_digraph, relabel
from subiso.model import X, Y, check_assignment, grid_to_point, point_to_grid
from subiso.oracle import sat_brute_force, tsp_brute_force
from subiso.reductions import (
    CNF,
    all_cnfs,
    hamiltonian_pattern,
    parse_cnf,
    random_cnf,
    sat_to_subgi,
    serialize_cnf,
    tsp_model,
)
from subiso.solver import Infeasible, Optimal, feasibility, optimize, verify_certificate, verify_optimal


def test_hamiltonian_pattern(c3):
    assert hamiltonian_pattern(3) == c3
    assert hamiltonian_pattern(2) == Digraph.from_arcs(2, [(1, 2), (2, 1)])
    with pytest.raises(ValueError):
        hamiltonian_pattern(1)


@pytest.mark.parametrize("n", [2, 3, 5, 6])
def test_hamiltonian_pattern_rotation(n):
    rot = [k % n + 1 for k in range(1, n + 1)]
    assert relabel(hamiltonian_pattern(n), rot) == hamiltonian_pattern(n)


def _complete(n, weight):
    return WeightedDigraph(n, [[None if u == v else weight(u, v) for v in range(1, n + 1)] for u in range(1, n + 1)])


def test_tsp_unit_weights():
    g = _complete(3, lambda u, v: 1)
    sys, obj = tsp_model(g)
    res = optimize(sys, obj)
    assert isinstance(res, Optimal)
    assert res.value == 3 == tsp_brute_force(g)[0]
    assert verify_optimal(sys, obj, res)


def test_tsp_objective_counts_tour_cost():
    g = random_weighted_digraph(4, 1, (-4, 9), seed=3)
    sys, obj = tsp_model(g)
    for perm in itertools.permutations(range(1, 5)):
        point = grid_to_point(dict_grid(perm))
        if not check_assignment(sys, point):
            continue
        cost = sum(g.w(perm[k], perm[(k + 1) % 4]) for k in range(4))
        assert sum(c * point[v] for v, c in obj.items()) == cost


def dict_grid(perm):
    from subiso.compat import SolutionGrid

    return SolutionGrid(tuple(perm))


def test_tsp_no_cycle_is_infeasible():
    w = [[None, 1, 1], [1, None, 1], [None, None, None]]
    g = WeightedDigraph(3, w)
    sys, obj = tsp_model(g)
    res = optimize(sys, obj)
    assert isinstance(res, Infeasible)
    assert verify_certificate(sys, res)
    assert tsp_brute_force(g) is None


def test_tsp_negative_weights():
    g = _complete(3, lambda u, v: Fraction(-u * v, 2))
    sys, obj = tsp_model(g)
    res = optimize(sys, obj)
    assert isinstance(res, Optimal)
    assert res.value <= tsp_brute_force(g)[0]
    assert any(c < 0 for c in obj.values())


def test_tsp_small_n_error():
    with pytest.raises(ValueError):
        tsp_model(WeightedDigraph(1, [[None]]))


@pytest.mark.parametrize("seed", range(6))
def test_tsp_lower_bound(seed):
    n = 3 + seed % 2
    g = random_weighted_digraph(n, Fraction(4, 5), (-3, 9), seed)
    sys, obj = tsp_model(g)
    res = optimize(sys, obj)
    brute = tsp_brute_force(g)
    if brute is None:
        assert isinstance(res, Infeasible)
    else:
        assert isinstance(res, Optimal) and verify_optimal(sys, obj, res)
        assert res.value <= brute[0]


def test_parse_cnf_examples():
    assert parse_cnf("p cnf 1 2\n1 0\n-1 0").clauses == ((1,), (-1,))
    assert parse_cnf("c hello\np cnf 2 1\n1 -2 0\n%\n0\n").clauses == ((1, -2),)
    assert parse_cnf("p cnf 3 2\n1 2\n 3 0 -1\n").clauses == ((1, 2, 3), (-1,))


@pytest.mark.parametrize(
    "text, line",
    [
        ("1 0", 1),
        ("p cnf 2", 1),
        ("p cnf 2 1\np cnf 2 1\n1 0", 2),
        ("p cnf 2 1\n0", 2),
        ("p cnf 2 1\n1 3 0", 2),
        ("p cnf 2 2\n1 0", 2),
        ("p cnf 2 1\n1 x 0", 2),
        ("", 1),
    ],
)
def test_parse_cnf_errors(text, line):
    with pytest.raises(ParseError) as exc:
        parse_cnf(text)
    assert exc.value.line == line


@given(st.integers(0, 10**6))
def test_cnf_round_trip(seed):
    f = random_cnf(5, 6, 4, seed)
    assert parse_cnf(serialize_cnf(f)) == f


def test_cnf_validation():
    with pytest.raises(ValueError):
        CNF(1, ((),))
    with pytest.raises(ValueError):
        CNF(1, ((2,),))


def test_sat_contradiction_instance():
    inst = sat_to_subgi(CNF(1, ((1,), (-1,))))
    assert inst.input.adj == ((1, 0), (0, 1))
    cert = feasibility(inst.system())
    assert not cert.is_feasible
    assert verify_certificate(inst.system(), cert)


def test_sat_implicant_instance():
    inst = sat_to_subgi(CNF(2, ((1, 2), (1,))))
    assert inst.blocks == (range(1, 3), range(3, 4))
    sys = inst.system()
    cert = feasibility(sys)
    assert cert.is_feasible and verify_certificate(sys, cert)
    grids = enumerate_grids(build_compat(inst.input, inst.pattern))
    in_blocks = [g for g in grids if check_assignment(sys, grid_to_point(g))]
    assert all(g[1] in (1, 2) and g[3] == 3 for g in in_blocks)
    # the implicant x1 & x1: first slot of each clause on literal x1
    assert any(g[1] == 1 for g in in_blocks)


def test_sat_single_clause_is_feasible():
    for clause in [(1,), (1, -2), (-1, 2, 3), (1, -1)]:
        f = CNF(3, (clause,))
        sys = sat_to_subgi(f).system()
        assert feasibility(sys).is_feasible


def test_sat_layout():
    f = CNF(2, ((1, -2), (2,), (-1, 2)))
    inst = sat_to_subgi(f)
    assert inst.input.n == 5
    assert [inst.slot(p) for p in range(1, 6)] == [(1, 1), (1, 2), (2, 1), (3, 1), (3, 2)]
    with pytest.raises(IndexError):
        inst.slot(6)
    lits = [1, -2, 2, -1, 2]
    for p in range(5):
        for q in range(5):
            assert inst.input.adj[p][q] == (0 if lits[p] == -lits[q] else 1)
    assert {(u, v) for u, v, _ in inst.pattern.arcs()} == {(a, b) for a in (1, 3, 4) for b in (1, 3, 4)}
    assert Y(1, 3) in inst.extra_zeros and Y(1, 2) not in inst.extra_zeros
    assert len(inst.extra_zeros) == sum(len(b) * (5 - len(b)) for b in inst.blocks)


def _implicant_exists(f):
    return any(
        all(a != -b for a, b in itertools.combinations(choice, 2))
        for choice in itertools.product(*f.clauses)
    )


def test_implicants_match_oracle_and_grids():
    for f in itertools.islice(all_cnfs(2, 2), 0, None, 3):
        inst = sat_to_subgi(f)
        sys = inst.system()
        in_block = [
            g
            for g in enumerate_grids(build_compat(inst.input, inst.pattern))
            if all(inst.slot(p)[0] == inst.slot(g[p])[0] for p in range(1, inst.input.n + 1))
        ]
        assert bool(in_block) == _implicant_exists(f) == bool(sat_brute_force(f))
        for g in in_block:
            assert check_assignment(sys, grid_to_point(g))


def test_all_cnfs_count():
    # 3 nonempty literal sets over one variable, 15 over two
    assert sum(1 for _ in all_cnfs(1, 2)) == 3 + 9
    assert sum(1 for _ in all_cnfs(2, 2)) == 3 + 9 + 15 + 225


def test_random_cnf_shape():
    for seed in range(40):
        f = random_cnf(3, 3, 3, seed)
        assert 1 <= f.num_vars <= 3 and 1 <= len(f.clauses) <= 3
        for c in f.clauses:
            assert len({abs(l) for l in c}) == len(c) <= 3
    assert random_cnf(3, 3, 3, 5) == random_cnf(3, 3, 3, 5)
