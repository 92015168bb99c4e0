"""``subiso`` command line.

Exit codes for decision commands: 0 YES / feasible, 1 NO / infeasible,
2 for parse, IO, size-cap and pivot-limit errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .compat import build_compat, propagate
from .graph import InvalidInstance, ParseError, pad_pattern, parse_digraph, parse_weighted_digraph
from .harness import compare, compare_exhaustive, format_example_table, run_examples, solve_instance
from .model import aggregate, build_base_system, emit_lp, point_to_grid, zero_constraints
from .oracle import DEFAULT_SAT_CAP, DEFAULT_SUBGI_CAP, SizeError, sat_brute_force, subgi_brute_force, tsp_brute_force
from .reductions import parse_cnf, sat_to_subgi, tsp_model
from .solver import Infeasible, LimitExceeded, Optimal, feasibility, optimize, verify_certificate, verify_optimal

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


class CommandError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CommandError(f"{path}: {e.strerror or e}") from None


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise CommandError(f"{path}: {e.strerror or e}") from None


def _load_digraph(path: str):
    try:
        return parse_digraph(_read(path))
    except ParseError as e:
        raise CommandError(f"{path}: {e}") from None


def _load_pair(args):
    return _load_digraph(args.input), _load_digraph(args.pattern)


def _instance_system(g, s, use_propagation: bool):
    c = build_compat(g, pad_pattern(s, g.n))
    if use_propagation:
        c = propagate(c)
    return aggregate(build_base_system(g.n), zero_constraints(c))


def cmd_check(args) -> int:
    g, s = _load_pair(args)
    res = solve_instance(g, s, args.propagate)
    if res.system is None:
        print(f"NO (pattern has {s.n} vertices, input has {g.n})")
        if args.emit_certificate:
            doc = {"outcome": "infeasible", "reason": "pattern larger than input"}
            _write(args.emit_certificate, json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_NO
    if args.emit_lp:
        _write(args.emit_lp, emit_lp(res.system))
    if args.emit_certificate:
        doc = res.certificate.to_json(res.system)
        doc["verified"] = res.verified
        _write(args.emit_certificate, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    status = "verified" if res.verified else "FAILED VERIFICATION"
    print(f"{res.verdict} (n={g.n}, {len(res.system.zero_fixed)} zero constraints, certificate {status})")
    if res.feasible:
        grid = point_to_grid(res.certificate.point, g.n)
        if grid is not None:
            print("grid: " + " ".join(f"{j}->{grid[j]}" for j in range(1, g.n + 1)))
    if not res.verified:
        return EXIT_ERROR
    return EXIT_YES if res.feasible else EXIT_NO


def cmd_oracle(args) -> int:
    g, s = _load_pair(args)
    verdict = subgi_brute_force(g, s, args.cap)
    print(verdict.answer)
    if verdict:
        grid = verdict.witness
        print("map: " + " ".join(f"{j}->{grid[j]}" for j in range(1, s.n + 1)))
        return EXIT_YES
    return EXIT_NO


def cmd_examples(args) -> int:
    rows = run_examples(args.propagate)
    print(format_example_table(rows))
    for row in rows:
        if row.lp_label == "COUNTEREXAMPLE":
            print(f"\ncounterexample for {row.example.name}: LP feasible, oracle NO")
            point = row.lp.certificate.point
            for v in row.lp.system.variables:
                if point[v]:
                    print(f"  {v.name} = {point[v]}")
    ok = all(r.ok for r in rows)
    print(f"\n{sum(r.ok for r in rows)}/{len(rows)} rows agree")
    return EXIT_YES if ok else EXIT_NO


def cmd_compare(args) -> int:
    if args.exhaustive:
        if args.n > 2:
            raise CommandError("exhaustive mode is limited to n <= 2")
        report = compare_exhaustive(args.n)
    else:
        report = compare(
            args.n,
            args.trials,
            args.seed,
            args.arc_probability,
            args.pattern_density,
            args.max_multiplicity,
            args.cap,
        )
    print(report.summary())
    if args.report:
        _write(args.report, report.dumps())
    if args.out:
        report.write_artifacts(Path(args.out))
    return EXIT_YES if report.sound else EXIT_NO


def cmd_tsp(args) -> int:
    try:
        g = parse_weighted_digraph(_read(args.graph))
    except ParseError as e:
        raise CommandError(f"{args.graph}: {e}") from None
    if g.n < 2:
        raise CommandError("TSP needs at least two vertices")
    system, objective = tsp_model(g)
    res = optimize(system, objective)
    brute = tsp_brute_force(g, args.cap) if g.n <= args.cap else None
    if isinstance(res, Infeasible):
        print(f"LP: infeasible (certificate {'verified' if verify_certificate(system, res) else 'FAILED'})")
        print("brute force: " + ("no Hamiltonian cycle" if brute is None else f"{brute[0]}"))
        return EXIT_NO
    if not isinstance(res, Optimal):
        raise CommandError("LP unexpectedly unbounded")
    grid = point_to_grid(res.point, g.n)
    print(f"LP value: {res.value} (optimality {'verified' if verify_optimal(system, objective, res) else 'FAILED'})")
    print(f"integral optimum: {'yes' if grid is not None else 'no'}")
    if grid is not None:
        print("tour: " + " -> ".join(str(grid[k]) for k in range(1, g.n + 1)))
    if g.n <= args.cap:
        if brute is None:
            print("brute force: no Hamiltonian cycle")
        else:
            print(f"brute force: {brute[0]} via {' -> '.join(map(str, brute[1]))}")
            print(f"gap: {brute[0] - res.value}")
    return EXIT_YES


def cmd_sat(args) -> int:
    try:
        cnf = parse_cnf(_read(args.cnf))
    except ParseError as e:
        raise CommandError(f"{args.cnf}: {e}") from None
    inst = sat_to_subgi(cnf)
    system = inst.system()
    cert = feasibility(system)
    lp = "YES" if cert.is_feasible else "NO"
    print(f"LP: {lp} (certificate {'verified' if verify_certificate(system, cert) else 'FAILED'})")
    try:
        oracle = sat_brute_force(cnf, args.cap).answer
    except SizeError:
        oracle = None
    print(f"oracle: {oracle or 'skipped (too many variables)'}")
    if oracle is not None:
        print(f"agree: {'yes' if oracle == lp else 'no'}")
    return EXIT_YES if cert.is_feasible else EXIT_NO


def cmd_emit_lp(args) -> int:
    g, s = _load_pair(args)
    if s.n > g.n:
        raise CommandError(f"pattern has {s.n} vertices, input has {g.n}")
    _write(args.output, emit_lp(_instance_system(g, s, args.propagate)))
    return EXIT_YES


def _rational(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None
    if not 0 <= q <= 1:
        raise argparse.ArgumentTypeError("probability must lie in [0, 1]")
    return q


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subiso", description="Linear model for subgraph isomorphism")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide an instance with the LP model")
    p.add_argument("input")
    p.add_argument("pattern")
    p.add_argument("--propagate", action="store_true", help="apply path-consistency before building the system")
    p.add_argument("--emit-certificate", metavar="PATH", help="write the certificate as JSON ('-' for stdout)")
    p.add_argument("--emit-lp", metavar="PATH", help="write the aggregated system in LP format")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("oracle", help="decide an instance by brute force")
    p.add_argument("input")
    p.add_argument("pattern")
    p.add_argument("--cap", type=int, default=DEFAULT_SUBGI_CAP)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("examples", help="run the worked-example table")
    p.add_argument("--propagate", action="store_true")
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("compare", help="randomized LP-versus-oracle audit")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--arc-probability", type=_rational, default=Fraction(1, 2))
    p.add_argument("--pattern-density", type=_rational, default=Fraction(1, 2))
    p.add_argument("--max-multiplicity", type=int, default=1)
    p.add_argument("--exhaustive", action="store_true", help="all 0/1 digraph pairs of size n (n <= 2)")
    p.add_argument("--cap", type=int, default=DEFAULT_SUBGI_CAP)
    p.add_argument("--report", metavar="PATH", help="write the JSON report ('-' for stdout)")
    p.add_argument("--out", metavar="DIR", help="write replayable files for each disagreement")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("tsp", help="TSP relaxation on a weighted digraph")
    p.add_argument("graph")
    p.add_argument("--cap", type=int, default=DEFAULT_SUBGI_CAP)
    p.set_defaults(func=cmd_tsp)

    p = sub.add_parser("sat", help="SAT through the subgraph isomorphism model")
    p.add_argument("cnf")
    p.add_argument("--cap", type=int, default=DEFAULT_SAT_CAP)
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("emit-lp", help="write the aggregated system in LP format")
    p.add_argument("input")
    p.add_argument("pattern")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--propagate", action="store_true")
    p.set_defaults(func=cmd_emit_lp)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_YES
    try:
        return args.func(args)
    except (CommandError, InvalidInstance, SizeError, LimitExceeded, ValueError) as e:
        print(f"subiso: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
