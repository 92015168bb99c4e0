"""Exact rational LP feasibility and minimisation with checkable certificates.

The solver works on a :class:`~subiso.model.LinearSystem` (equalities,
nonnegative variables, some pinned to zero) in three stages:

1. Presolve drops pinned columns and propagates implied zeros: a row with
   zero right-hand side whose remaining coefficients all share a sign forces
   every remaining variable to zero. A row that can no longer balance its
   right-hand side ends the solve with a one-row Farkas witness.
2. Two-phase tableau simplex with Bland's rule over ``gmpy2.mpq``. Artificial
   columns are kept in the tableau so the final duals can be read off them.
3. Multipliers found on the reduced problem are lifted back through the
   presolve derivations, in reverse order, so that certificates refer to the
   original rows only.

Every certificate is verified with :func:`verify_certificate`, which uses
plain :class:`fractions.Fraction` arithmetic and none of the code above.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from gmpy2 import mpq

from .model import Assignment, LinearSystem, Var, check_assignment

__all__ = [
    "FarkasWitness",
    "Feasible",
    "Infeasible",
    "Optimal",
    "Unbounded",
    "Certificate",
    "OptResult",
    "LimitExceeded",
    "feasibility",
    "optimize",
    "verify_certificate",
    "verify_optimal",
    "verify_unbounded",
    "DEFAULT_PIVOT_LIMIT",
]

DEFAULT_PIVOT_LIMIT = 10**6
PIVOT_LIMIT_ENV = "SUBISO_PIVOT_LIMIT"

_ZERO = mpq(0)
_ONE = mpq(1)


class LimitExceeded(RuntimeError):
    """The pivot budget ran out before a verdict was reached."""


@dataclass(frozen=True)
class FarkasWitness:
    """Row multipliers proving that no nonnegative solution exists.

    With ``lam`` the row multipliers, every equality combines into
    ``sum_v (lam^T A)_v * v = lam^T b``. The left side is nonnegative for any
    candidate (free variables have ``(lam^T A)_v >= 0``, pinned ones are 0)
    while ``lam^T b < 0``. ``bound_multipliers`` lists the nonzero
    ``(lam^T A)_v``: nonnegative on sign bounds, any sign on pinned variables.
    """

    row_multipliers: dict[int, Fraction]
    bound_multipliers: dict[Var, Fraction]
    rhs: Fraction

    def to_json(self, sys: LinearSystem) -> dict:
        return {
            "rows": {f"r{r + 1}": str(v) for r, v in sorted(self.row_multipliers.items()) if v},
            "bounds": {
                v.name: str(q)
                for v, q in sorted(self.bound_multipliers.items(), key=lambda t: sys.index(t[0]))
            },
            "combined_rhs": str(self.rhs),
        }


@dataclass(frozen=True)
class Feasible:
    point: Assignment

    is_feasible = True

    def to_json(self, sys: LinearSystem) -> dict:
        return {
            "outcome": "feasible",
            "point": {v.name: str(self.point[v]) for v in sys.variables if self.point[v]},
        }


@dataclass(frozen=True)
class Infeasible:
    witness: FarkasWitness

    is_feasible = False

    def to_json(self, sys: LinearSystem) -> dict:
        return {"outcome": "infeasible", "farkas": self.witness.to_json(sys)}


Certificate = Union[Feasible, Infeasible]


@dataclass(frozen=True)
class Optimal:
    """Optimal value and point, with row duals proving optimality."""

    value: Fraction
    point: Assignment
    duals: dict[int, Fraction] = field(default_factory=dict)


@dataclass(frozen=True)
class Unbounded:
    point: Assignment
    ray: Assignment


OptResult = Union[Optimal, Infeasible, Unbounded]


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _pivot_limit(limit: int | None) -> int:
    if limit is not None:
        return limit
    env = os.environ.get(PIVOT_LIMIT_ENV)
    return int(env) if env else DEFAULT_PIVOT_LIMIT


class _Problem:
    """Column-indexed copy of a system plus the presolve bookkeeping."""

    def __init__(self, sys: LinearSystem):
        self.sys = sys
        self.ncols = len(sys.variables)
        self.rows: list[dict[int, mpq]] = []
        self.rhs: list[mpq] = []
        for row in sys.equalities:
            self.rows.append(
                {sys.index(v): mpq(c.numerator, c.denominator) for v, c in row.coeffs}
            )
            self.rhs.append(mpq(row.rhs.numerator, row.rhs.denominator))
        self.pinned = {sys.index(v) for v in sys.zero_fixed}
        self.fixed = set(self.pinned)
        # (row, sign, columns) per propagation step, in order
        self.derivations: list[tuple[int, int, list[int]]] = []
        self.live_rows: list[int] = []

    def presolve(self) -> dict[int, mpq] | None:
        """Propagate forced zeros. Returns Farkas row multipliers on a dead end."""
        cols_rows: dict[int, list[int]] = {}
        for r, row in enumerate(self.rows):
            for k in row:
                cols_rows.setdefault(k, []).append(r)
        queue = deque(range(len(self.rows)))
        queued = set(queue)
        done: set[int] = set()
        while queue:
            r = queue.popleft()
            queued.discard(r)
            if r in done:
                continue
            row, b = self.rows[r], self.rhs[r]
            active = [(k, a) for k, a in row.items() if k not in self.fixed]
            pos = any(a > 0 for _, a in active)
            neg = any(a < 0 for _, a in active)
            # sum over active must equal b
            if (b > 0 and not pos) or (b < 0 and not neg):
                return {r: -_ONE if b > 0 else _ONE}
            if b == 0 and not (pos and neg):
                done.add(r)
                if active:
                    cols = sorted(k for k, _ in active)
                    self.derivations.append((r, 1 if pos else -1, cols))
                    self.fixed.update(cols)
                    for k in cols:
                        for r2 in cols_rows.get(k, ()):
                            if r2 not in done and r2 not in queued:
                                queue.append(r2)
                                queued.add(r2)
        self.live_rows = [r for r in range(len(self.rows)) if r not in done]
        return None

    def reduced_costs(self, lam: Mapping[int, mpq], cost: Mapping[int, mpq]) -> dict[int, mpq]:
        red = dict(cost)
        for r, l in lam.items():
            if l:
                for k, a in self.rows[r].items():
                    red[k] = red.get(k, _ZERO) + l * a
        return red

    def lift(self, lam: dict[int, mpq], cost: Mapping[int, mpq]) -> dict[int, mpq]:
        """Make ``cost + A^T lam`` nonnegative on every column not pinned by the caller."""
        lam = dict(lam)
        red = self.reduced_costs(lam, cost)
        for r, sign, cols in reversed(self.derivations):
            for k in cols:
                d = red.get(k, _ZERO)
                if d < 0:
                    a = self.rows[r][k]
                    t = sign * (-d) / abs(a)
                    lam[r] = lam.get(r, _ZERO) + t
                    for k2, a2 in self.rows[r].items():
                        red[k2] = red.get(k2, _ZERO) + t * a2
        return {r: l for r, l in lam.items() if l}

    def witness(self, lam: dict[int, mpq]) -> FarkasWitness:
        lam = self.lift(lam, {})
        red = self.reduced_costs(lam, {})
        sys = self.sys
        rhs = sum((l * self.rhs[r] for r, l in lam.items()), _ZERO)
        return FarkasWitness(
            row_multipliers={r: _to_fraction(l) for r, l in sorted(lam.items())},
            bound_multipliers={
                sys.variables[k]: _to_fraction(d) for k, d in sorted(red.items()) if d
            },
            rhs=_to_fraction(rhs),
        )

    def assignment(self, values: Mapping[int, mpq]) -> Assignment:
        out = {v: Fraction(0) for v in self.sys.variables}
        for k, q in values.items():
            if q:
                out[self.sys.variables[k]] = _to_fraction(q)
        return out


class _Tableau:
    """Dense-basis, sparse-row simplex tableau over the presolved problem."""

    def __init__(self, prob: _Problem, pivot_limit: int):
        self.prob = prob
        self.limit = pivot_limit
        self.pivots = 0
        self.cols = sorted(k for k in range(prob.ncols) if k not in prob.fixed)
        self.colmap = {k: t for t, k in enumerate(self.cols)}
        self.nstruct = len(self.cols)
        self.row_ids = list(prob.live_rows)
        self.rows: list[dict[int, mpq]] = []
        self.rhs: list[mpq] = []
        self.flip: list[bool] = []
        self.orig_rows: list[dict[int, mpq]] = []
        for t, r in enumerate(self.row_ids):
            b = prob.rhs[r]
            s = -1 if b < 0 else 1
            row = {
                self.colmap[k]: a * s for k, a in prob.rows[r].items() if k in self.colmap
            }
            self.orig_rows.append(dict(row))
            row[self.nstruct + t] = _ONE
            self.rows.append(row)
            self.rhs.append(b * s)
            self.flip.append(s < 0)
        self.basis = [self.nstruct + t for t in range(len(self.rows))]
        self.obj: dict[int, mpq] = {}
        self.objval = _ZERO

    def _pivot(self, p: int, j: int):
        self.pivots += 1
        if self.pivots > self.limit:
            raise LimitExceeded(f"pivot limit {self.limit} exceeded")
        prow = self.rows[p]
        piv = prow[j]
        if piv != 1:
            inv = _ONE / piv
            prow = {k: v * inv for k, v in prow.items()}
            self.rows[p] = prow
            self.rhs[p] *= inv
        bp = self.rhs[p]
        items = list(prow.items())
        for r, row in enumerate(self.rows):
            if r == p:
                continue
            f = row.get(j)
            if f is None:
                continue
            for k, v in items:
                nv = row.get(k, _ZERO) - f * v
                if nv:
                    row[k] = nv
                else:
                    del row[k]
            if bp:
                self.rhs[r] -= f * bp
        f = self.obj.get(j)
        if f is not None:
            obj = self.obj
            for k, v in items:
                nv = obj.get(k, _ZERO) - f * v
                if nv:
                    obj[k] = nv
                else:
                    del obj[k]
            self.objval -= f * bp
        self.basis[p] = j

    def _entering(self) -> int | None:
        """Bland's rule: lowest-index column with negative reduced cost."""
        best = None
        for k, d in self.obj.items():
            if d < 0 and k < self.nstruct and (best is None or k < best):
                best = k
        return best

    def _leaving(self, j: int) -> tuple[int | None, mpq | None]:
        best = None
        best_ratio = None
        for r, row in enumerate(self.rows):
            a = row.get(j)
            if a is not None and a > 0:
                ratio = self.rhs[r] / a
                if (
                    best is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and self.basis[r] < self.basis[best])
                ):
                    best, best_ratio = r, ratio
        return best, best_ratio

    def _run(self) -> int | None:
        """Bland iterations until optimal (None) or an unbounded entering column."""
        while True:
            j = self._entering()
            if j is None:
                return None
            p, _ = self._leaving(j)
            if p is None:
                return j
            self._pivot(p, j)

    def crash(self):
        """Swap artificials of zero right-hand-side rows for structural columns.

        Pivots on a row with zero right-hand side leave every value unchanged,
        so the basis stays feasible whatever the pivot sign. The lowest-index
        column is taken; on these systems that keeps fill-in and the number of
        later Bland iterations small.
        """
        for p in range(len(self.rows)):
            if self.rhs[p] == 0 and self.basis[p] >= self.nstruct:
                js = [k for k in self.rows[p] if k < self.nstruct]
                if js:
                    self._pivot(p, min(js))

    def phase_one(self) -> bool:
        """Minimise the artificial sum. True when it reaches zero."""
        self.crash()
        self.set_cost({}, _ONE)
        self._run()
        return self.objval == 0

    def duals(self, art_cost: mpq) -> dict[int, mpq]:
        """Multipliers lam = -y on original row ids, y_r = c_art - d_art."""
        lam = {}
        for t, r in enumerate(self.row_ids):
            y = art_cost - self.obj.get(self.nstruct + t, _ZERO)
            if self.flip[t]:
                y = -y
            if y:
                lam[r] = -y
        return lam

    def drive_out_artificials(self):
        """Pivot basic artificials out where possible, then drop artificial columns.

        A row whose artificial cannot leave has no structural entries; it is
        redundant and stays inert for the rest of the solve.
        """
        for p in range(len(self.rows)):
            if self.basis[p] >= self.nstruct:
                js = [k for k in self.rows[p] if k < self.nstruct]
                if js:
                    self._pivot(p, min(js))
        for row in self.rows:
            for k in [k for k in row if k >= self.nstruct]:
                del row[k]

    def basis_duals(self, cost: Mapping[int, mpq]) -> dict[int, mpq]:
        """Solve y^T B = c_B on the final basis; returns lam = -y on original row ids."""
        ns = self.nstruct
        live = [t for t, b in enumerate(self.basis) if b < ns]
        basic = {self.basis[t] for t in live}
        # equation per basic column b: sum_t y_t A[t][b] = c_b
        eqs: dict[int, dict[int, mpq]] = {b: {} for b in basic}
        for t in live:
            for k, a in self.orig_rows[t].items():
                if k in eqs:
                    eqs[k][t] = a
        y = _solve_sparse([(eqs[b], cost.get(self.cols[b], _ZERO)) for b in sorted(basic)])
        lam = {}
        for t, v in y.items():
            r = self.row_ids[t]
            if v:
                lam[r] = v if self.flip[t] else -v
        return lam

    def set_cost(self, cost: Mapping[int, mpq], art_cost: mpq = _ZERO):
        """Reduced costs for structural costs ``cost`` (original column ids)."""
        ns = self.nstruct
        obj = {self.colmap[k]: c for k, c in cost.items() if k in self.colmap and c}
        if art_cost:
            for t in range(len(self.rows)):
                obj[ns + t] = art_cost
        val = _ZERO
        for r, row in enumerate(self.rows):
            b = self.basis[r]
            cb = cost.get(self.cols[b], _ZERO) if b < ns else art_cost
            if cb:
                for k, a in row.items():
                    obj[k] = obj.get(k, _ZERO) - cb * a
                val += cb * self.rhs[r]
        self.obj = {k: v for k, v in obj.items() if v}
        # objval holds minus the current objective, as in the tableau's corner cell
        self.objval = -val

    def values(self) -> dict[int, mpq]:
        return {
            self.cols[b]: self.rhs[r]
            for r, b in enumerate(self.basis)
            if b < self.nstruct and self.rhs[r]
        }


def _solve_sparse(eqs: list[tuple[dict[int, mpq], mpq]]) -> dict[int, mpq]:
    """Exact solution of a nonsingular sparse square system by elimination."""
    import heapq

    pivots: dict[int, tuple[dict[int, mpq], mpq]] = {}
    order: list[int] = []
    for coeffs, rhs in eqs:
        row = dict(coeffs)
        heap = [k for k in row if k in pivots]
        heapq.heapify(heap)
        seen = set(heap)
        while heap:
            k = heapq.heappop(heap)
            f = row.get(k)
            if not f:
                continue
            prow, prhs = pivots[k]
            for k2, a in prow.items():
                nv = row.get(k2, _ZERO) - f * a
                if nv:
                    row[k2] = nv
                    if k2 in pivots and k2 not in seen:
                        heapq.heappush(heap, k2)
                        seen.add(k2)
                else:
                    row.pop(k2, None)
            rhs -= f * prhs
        piv = min(row)
        inv = _ONE / row[piv]
        pivots[piv] = ({k: a * inv for k, a in row.items()}, rhs * inv)
        order.append(piv)
    sol: dict[int, mpq] = {}
    for piv in reversed(order):
        prow, prhs = pivots[piv]
        sol[piv] = prhs - sum((a * sol[k] for k, a in prow.items() if k != piv), _ZERO)
    return sol


def feasibility(sys: LinearSystem, pivot_limit: int | None = None) -> Certificate:
    """Decide whether ``sys`` has a solution; return a point or a Farkas witness.

    Deterministic: the same system always yields the same certificate.
    Raises :class:`LimitExceeded` if the pivot budget (default 10**6, or the
    ``SUBISO_PIVOT_LIMIT`` environment variable) runs out.
    """
    prob = _Problem(sys)
    dead = prob.presolve()
    if dead is not None:
        return Infeasible(prob.witness(dead))
    tab = _Tableau(prob, _pivot_limit(pivot_limit))
    if not tab.phase_one():
        return Infeasible(prob.witness(tab.duals(_ONE)))
    return Feasible(prob.assignment(tab.values()))


def optimize(
    sys: LinearSystem, objective: Mapping[Var, Fraction], pivot_limit: int | None = None
) -> OptResult:
    """Minimise ``sum(objective[v] * v)`` over the solutions of ``sys``."""
    for v in objective:
        if v not in sys:
            raise ValueError(f"objective references unknown variable {v}")
    prob = _Problem(sys)
    cost = {
        sys.index(v): mpq(c.numerator, c.denominator)
        for v, c in ((v, Fraction(c)) for v, c in objective.items())
        if c
    }
    dead = prob.presolve()
    if dead is not None:
        return Infeasible(prob.witness(dead))
    tab = _Tableau(prob, _pivot_limit(pivot_limit))
    if not tab.phase_one():
        return Infeasible(prob.witness(tab.duals(_ONE)))
    tab.drive_out_artificials()
    tab.set_cost(cost)
    j = tab._run()
    point = prob.assignment(tab.values())
    if j is not None:
        ray = {tab.cols[j]: _ONE}
        for r, b in enumerate(tab.basis):
            a = tab.rows[r].get(j)
            if a and b < tab.nstruct:
                ray[tab.cols[b]] = -a
        return Unbounded(point, prob.assignment(ray))
    value = -tab.objval
    lam = prob.lift(tab.basis_duals(cost), cost)
    return Optimal(
        _to_fraction(value),
        point,
        {r: _to_fraction(-l) for r, l in sorted(lam.items())},
    )


def _combine(sys: LinearSystem, mult: Mapping[int, Fraction]) -> tuple[dict[Var, Fraction], Fraction]:
    lhs: dict[Var, Fraction] = {}
    rhs = Fraction(0)
    for r, l in mult.items():
        row = sys.equalities[r]
        for v, a in row.coeffs:
            lhs[v] = lhs.get(v, Fraction(0)) + l * a
        rhs += l * row.rhs
    return lhs, rhs


def verify_certificate(sys: LinearSystem, cert: Certificate) -> bool:
    """Check a certificate against ``sys`` in plain rational arithmetic."""
    if isinstance(cert, Feasible):
        return check_assignment(sys, cert.point)
    if not isinstance(cert, Infeasible):
        return False
    w = cert.witness
    if any(not 0 <= r < len(sys.equalities) for r in w.row_multipliers):
        return False
    lhs, rhs = _combine(sys, w.row_multipliers)
    if rhs >= 0 or rhs != w.rhs:
        return False
    for v in sys.variables:
        d = lhs.get(v, Fraction(0))
        if d != w.bound_multipliers.get(v, Fraction(0)):
            return False
        if d < 0 and v not in sys.zero_fixed:
            return False
    return all(v in sys for v in w.bound_multipliers)


def verify_optimal(sys: LinearSystem, objective: Mapping[Var, Fraction], res: Optimal) -> bool:
    """Primal feasibility, stated value, and dual feasibility with equal value."""
    if not check_assignment(sys, res.point):
        return False
    value = sum((Fraction(c) * res.point[v] for v, c in objective.items()), Fraction(0))
    if value != res.value:
        return False
    aty, bty = _combine(sys, res.duals)
    if bty != res.value:
        return False
    for v in sys.variables:
        if v in sys.zero_fixed:
            continue
        if Fraction(objective.get(v, 0)) - aty.get(v, Fraction(0)) < 0:
            return False
    return True


def verify_unbounded(sys: LinearSystem, objective: Mapping[Var, Fraction], res: Unbounded) -> bool:
    if not check_assignment(sys, res.point):
        return False
    ray = res.ray
    if any(q < 0 for q in ray.values()) or any(ray.get(v) for v in sys.zero_fixed):
        return False
    if any(row.evaluate(ray) != 0 for row in sys.equalities):
        return False
    return sum((Fraction(c) * ray.get(v, 0) for v, c in objective.items()), Fraction(0)) < 0
