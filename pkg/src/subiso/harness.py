"""Decision pipeline, the worked-example table, and the LP-versus-oracle audit.

The audit classifies each trial by (LP verdict, brute-force verdict). An LP
infeasible verdict on a YES instance is a soundness violation and must
never happen: the witness grid's 0/1 point satisfies the aggregated system,
and the harness checks that point directly on every YES trial. LP feasible
on a NO instance is the unproven direction; such trials are kept as replayable
counterexample records rather than treated as errors.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .compat import CompatMatrix, build_compat, propagate
from .graph import Digraph, SplitMix64, _random_digraph, pad_pattern, serialize_digraph
from .model import LinearSystem, aggregate, build_base_system, check_assignment, grid_to_point, zero_constraints
from .oracle import DEFAULT_SUBGI_CAP, SizeError, Verdict, subgi_brute_force
from .solver import Certificate, feasibility, verify_certificate

__all__ = [
    "InstanceResult",
    "solve_instance",
    "WorkedExample",
    "worked_examples",
    "ExampleRow",
    "run_examples",
    "AgreementReport",
    "compare",
    "compare_exhaustive",
]


@dataclass
class InstanceResult:
    input: Digraph
    pattern: Digraph
    compat: CompatMatrix | None
    system: LinearSystem | None
    certificate: Certificate | None
    verified: bool

    @property
    def feasible(self) -> bool:
        return self.certificate is not None and self.certificate.is_feasible

    @property
    def verdict(self) -> str:
        return "YES" if self.feasible else "NO"


def solve_instance(input: Digraph, pattern: Digraph, use_propagation: bool = False) -> InstanceResult:
    """Pad, build the compatibility matrix and the aggregated system, decide it.

    A pattern larger than the input is answered NO without building a system.
    """
    if pattern.n > input.n:
        return InstanceResult(input, pattern, None, None, None, True)
    padded = pad_pattern(pattern, input.n)
    c = build_compat(input, padded)
    if use_propagation:
        c = propagate(c)
    sys = aggregate(build_base_system(input.n), zero_constraints(c))
    cert = feasibility(sys)
    return InstanceResult(input, padded, c, sys, cert, verify_certificate(sys, cert))


@dataclass(frozen=True)
class WorkedExample:
    name: str
    input: Digraph
    pattern: Digraph
    expected: str


def worked_examples() -> list[WorkedExample]:
    arcs = Digraph.from_arcs
    c3 = arcs(3, [(1, 2), (2, 3), (3, 1)])
    return [
        WorkedExample("vertex vs vertex (s=1, g=1)", arcs(1, [(1, 1)]), arcs(1, [(1, 1)]), "YES"),
        WorkedExample(
            "vertex vs vertex (s=2, g=1)", arcs(1, [(1, 1)]), arcs(1, [(1, 1), (1, 1)]), "NO"
        ),
        WorkedExample("arc vs arc", arcs(2, [(1, 2)]), arcs(2, [(2, 1)]), "YES"),
        WorkedExample("arc vs loop", arcs(2, [(1, 2)]), arcs(1, [(1, 1)]), "NO"),
        WorkedExample(
            "arc/loop vs loop/arc", arcs(2, [(1, 2), (2, 2)]), arcs(2, [(1, 1), (1, 2)]), "NO"
        ),
        WorkedExample("edge vs arc", arcs(2, [(1, 2), (2, 1)]), arcs(2, [(1, 2)]), "YES"),
        WorkedExample("cycle vs edge", c3, arcs(2, [(1, 2), (2, 1)]), "NO"),
        WorkedExample("cycle vs path", c3, arcs(3, [(1, 2), (2, 3)]), "YES"),
        WorkedExample("cycle vs cycle", arcs(4, [(1, 2), (2, 3), (3, 4), (4, 1)]), c3, "NO"),
    ]


@dataclass
class ExampleRow:
    example: WorkedExample
    lp: InstanceResult
    oracle: Verdict

    @property
    def lp_label(self) -> str:
        if self.lp.feasible and self.example.expected == "NO" and not self.oracle:
            return "COUNTEREXAMPLE"
        return self.lp.verdict

    @property
    def ok(self) -> bool:
        return (
            self.lp.verified
            and self.lp.verdict == self.example.expected
            and self.oracle.answer == self.example.expected
        )


def run_examples(use_propagation: bool = False) -> list[ExampleRow]:
    return [
        ExampleRow(ex, solve_instance(ex.input, ex.pattern, use_propagation), subgi_brute_force(ex.input, ex.pattern))
        for ex in worked_examples()
    ]


def format_example_table(rows: list[ExampleRow]) -> str:
    head = f"{'instance':<30} {'expect':>6} {'LP':>15} {'oracle':>7} {'cert':>5}"
    lines = [head, "-" * len(head)]
    for row in rows:
        lines.append(
            f"{row.example.name:<30} {row.example.expected:>6} {row.lp_label:>15} "
            f"{row.oracle.answer:>7} {'ok' if row.lp.verified else 'BAD':>5}"
        )
    return "\n".join(lines)


@dataclass
class AgreementReport:
    n: int
    seed: int | None
    arc_probability: str
    pattern_density: str
    mode: str = "random"
    trials: int = 0
    lp_feasible_and_oracle_yes: int = 0
    lp_infeasible_and_oracle_no: int = 0
    lp_feasible_and_oracle_no: int = 0
    lp_infeasible_and_oracle_yes: int = 0
    certificate_failures: int = 0
    witness_point_failures: int = 0
    counterexamples: list[dict] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return (
            self.lp_infeasible_and_oracle_yes == 0
            and self.certificate_failures == 0
            and self.witness_point_failures == 0
        )

    def record(self, trial: int, g: Digraph, s: Digraph, res: InstanceResult, oracle: Verdict):
        self.trials += 1
        if not res.verified:
            self.certificate_failures += 1
        entry = {
            "trial": trial,
            "input": serialize_digraph(g),
            "pattern": serialize_digraph(s),
        }
        if oracle:
            point = grid_to_point(oracle.witness, g.n)
            if res.system is None or not check_assignment(res.system, point):
                self.witness_point_failures += 1
                self.violations.append(dict(entry, kind="witness point infeasible"))
            if res.feasible:
                self.lp_feasible_and_oracle_yes += 1
            else:
                self.lp_infeasible_and_oracle_yes += 1
                self.violations.append(dict(entry, kind="LP infeasible on YES instance"))
        elif res.feasible:
            self.lp_feasible_and_oracle_no += 1
            point = res.certificate.point
            entry["lp_point"] = {v.name: str(q) for v, q in point.items() if q}
            self.counterexamples.append(entry)
        else:
            self.lp_infeasible_and_oracle_no += 1

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "n": self.n,
            "seed": self.seed,
            "arc_probability": self.arc_probability,
            "pattern_density": self.pattern_density,
            "trials": self.trials,
            "counts": {
                "lp_feasible_and_oracle_yes": self.lp_feasible_and_oracle_yes,
                "lp_infeasible_and_oracle_no": self.lp_infeasible_and_oracle_no,
                "lp_feasible_and_oracle_no": self.lp_feasible_and_oracle_no,
                "lp_infeasible_and_oracle_yes": self.lp_infeasible_and_oracle_yes,
            },
            "certificate_failures": self.certificate_failures,
            "witness_point_failures": self.witness_point_failures,
            "counterexamples": self.counterexamples,
            "violations": self.violations,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def summary(self) -> str:
        return "\n".join(
            [
                f"mode={self.mode} n={self.n} seed={self.seed} trials={self.trials}"
                f" p={self.arc_probability} d={self.pattern_density}",
                f"  LP feasible   & oracle YES : {self.lp_feasible_and_oracle_yes}",
                f"  LP infeasible & oracle NO  : {self.lp_infeasible_and_oracle_no}",
                f"  LP feasible   & oracle NO  : {self.lp_feasible_and_oracle_no}  (unproven direction)",
                f"  LP infeasible & oracle YES : {self.lp_infeasible_and_oracle_yes}  (must be 0)",
                f"  certificate failures       : {self.certificate_failures}",
                f"  witness point failures     : {self.witness_point_failures}",
            ]
        )

    def write_artifacts(self, out_dir: Path):
        """One directory per counterexample/violation holding replayable graph files."""
        out_dir.mkdir(parents=True, exist_ok=True)
        for label, items in (("counterexample", self.counterexamples), ("violation", self.violations)):
            for item in items:
                d = out_dir / f"{label}-{item['trial']:06d}"
                d.mkdir(exist_ok=True)
                (d / "input.graph").write_text(item["input"], encoding="utf-8")
                (d / "pattern.graph").write_text(item["pattern"], encoding="utf-8")
                (d / "record.json").write_text(
                    json.dumps(item, indent=2, sort_keys=True) + "\n", encoding="utf-8"
                )


def trial_instance(
    n: int, trial_seed: int, arc_probability: Fraction, pattern_density: Fraction, max_multiplicity: int = 1
) -> tuple[Digraph, Digraph]:
    """Input on n vertices, then a pattern on 1..n vertices, from one SplitMix64 stream."""
    rng = SplitMix64(trial_seed)
    g = _random_digraph(rng, n, arc_probability, max_multiplicity)
    s = _random_digraph(rng, 1 + rng.below(n), pattern_density, max_multiplicity)
    return g, s


def compare(
    n: int,
    trials: int,
    seed: int,
    arc_probability: Fraction | str = Fraction(1, 2),
    pattern_density: Fraction | str = Fraction(1, 2),
    max_multiplicity: int = 1,
    cap: int = DEFAULT_SUBGI_CAP,
) -> AgreementReport:
    """Trial t uses seed + t, so any single trial can be replayed in isolation."""
    if n > cap:
        raise SizeError(f"n={n} exceeds the oracle cap {cap}")
    p, d = Fraction(arc_probability), Fraction(pattern_density)
    report = AgreementReport(n, seed, str(p), str(d))
    for t in range(trials):
        g, s = trial_instance(n, seed + t, p, d, max_multiplicity)
        report.record(t, g, s, solve_instance(g, s), subgi_brute_force(g, s, cap))
    return report


def all_simple_digraphs(n: int):
    """Every 0/1 digraph on n vertices, loops included, in binary order."""
    for bits in itertools.product((0, 1), repeat=n * n):
        yield Digraph(n, [bits[k * n:(k + 1) * n] for k in range(n)])


def compare_exhaustive(n: int) -> AgreementReport:
    """All pairs of 0/1 digraphs on n vertices (2**(2 n^2) pairs)."""
    report = AgreementReport(n, None, "all", "all", mode="exhaustive")
    graphs = list(all_simple_digraphs(n))
    for t, (g, s) in enumerate(itertools.product(graphs, graphs)):
        report.record(t, g, s, solve_instance(g, s), subgi_brute_force(g, s))
    return report
