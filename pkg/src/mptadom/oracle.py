"""Bounded exhaustive ground truth.

Enumerates accepting edge sequences up to a length bound (DFS in edge-index
order, so the first hit is the lexicographically least witness sequence) and
decides, per sequence, whether timestamps exist meeting the objective.  Each
check is an exact LP over the sequence's difference constraints conjoined
with the linear cost atoms, so a Found result always carries a concrete
rational timestamp vector.

This is a semi-test harness: NoneUpTo(k) says nothing beyond length k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .linprog import Constraint, solve_lp, OPTIMAL
from .model import COST, CostVector, Mpta, TimedRun, check_run, dominates, run_cost
from .runpoly import lp_constraints, run_constraints, solution

DOMINATE = "dominate"
DOMINATE_EPS = "eps"
EXACT = "exact"


@dataclass(frozen=True)
class Objective:
    target: CostVector
    mode: str = DOMINATE
    epsilon: Optional[Fraction] = None

    def margin(self) -> Fraction:
        if self.mode == DOMINATE_EPS:
            if self.epsilon is None or self.epsilon <= 0:
                raise ValueError("eps mode needs a positive epsilon")
            return Fraction(self.epsilon)
        return Fraction(0)


@dataclass(frozen=True)
class OracleResult:
    outcome: str  # "found" | "none_up_to"
    bound: int
    run: Optional[TimedRun] = None
    explored: int = 0

    @property
    def found(self) -> bool:
        return self.outcome == "found"


def _cost_rows(m: Mpta, edges: Sequence[int]) -> dict[str, list[Fraction]]:
    """cost_y as a linear form over t_1..t_n: dwell i happens in the source
    location of edge i."""
    n = len(edges)
    rows = {y: [Fraction(0)] * n for y in m.observers}
    loc = m.initial
    for i, idx in enumerate(edges):
        rate = m.rates[loc]
        for y in m.observers:
            r = rate[y]
            if r:
                rows[y][i] += r
                if i > 0:
                    rows[y][i - 1] -= r
        loc = m.edges[idx].target
    return rows


def _objective_atoms(m: Mpta, obj: Objective, rows) -> list[Constraint]:
    eps = obj.margin()
    atoms = []
    for y in m.observers:
        target = obj.target[y]
        coeffs = tuple(rows[y])
        if obj.mode == EXACT:
            atoms.append(Constraint(coeffs, "==", target))
        elif m.partition[y] == COST:
            atoms.append(Constraint(coeffs, "<=", target - eps))
        else:
            atoms.append(Constraint(coeffs, ">=", target + eps))
    return atoms


def _prefix_prune_atoms(m: Mpta, obj: Objective, rows) -> list[Constraint]:
    """Sound pruning atoms for prefixes: accumulated cost only grows, so an
    upper-bounded observer already over target kills every extension."""
    eps = obj.margin()
    atoms = []
    for y in m.observers:
        if obj.mode == EXACT or m.partition[y] == COST:
            bound = obj.target[y] if obj.mode == EXACT else obj.target[y] - eps
            atoms.append(Constraint(tuple(rows[y]), "<=", bound))
    return atoms


def _check_zero_run(m: Mpta, obj: Objective) -> bool:
    zero = CostVector({y: Fraction(0) for y in m.observers})
    if obj.mode == EXACT:
        return all(obj.target[y] == 0 for y in m.observers)
    return dominates(m, obj.target, zero, obj.margin() or None)


def oracle_search(m: Mpta, obj: Objective, max_len: int) -> OracleResult:
    """DFS over accepting edge sequences of length <= max_len."""
    explored = 0

    def feasible_witness(edges: Sequence[int]) -> Optional[tuple[Fraction, ...]]:
        system = run_constraints(m, edges)
        rows = _cost_rows(m, edges)
        cons = lp_constraints(system) + _objective_atoms(m, obj, rows)
        res = solve_lp(len(edges), cons)
        if res.status == OPTIMAL:
            return res.x
        return None

    def prefix_viable(edges: Sequence[int]) -> bool:
        system = run_constraints(m, edges)
        if solution(system) is None:
            return False
        prune = _prefix_prune_atoms(m, obj, _cost_rows(m, edges))
        if not prune:
            return True
        res = solve_lp(len(edges), lp_constraints(system) + prune)
        return res.status == OPTIMAL

    if max_len >= 0 and m.initial in m.accepting and _check_zero_run(m, obj):
        return OracleResult(outcome="found", bound=max_len, run=TimedRun((), ()), explored=0)

    stack: list[tuple[tuple[int, ...], str]] = [((), m.initial)]
    found: Optional[TimedRun] = None
    while stack:
        prefix, loc = stack.pop()
        if prefix and loc in m.accepting:
            witness = feasible_witness(prefix)
            if witness is not None:
                found = TimedRun(prefix, witness)
                break
        if len(prefix) < max_len:
            children = []
            for ei, edge in m.edges_from(loc):
                seq = prefix + (ei,)
                explored += 1
                if prefix_viable(seq):
                    children.append((seq, edge.target))
            # LIFO stack: push in reverse so lower edge indices pop first,
            # giving exact preorder = lexicographic sequence order.
            stack.extend(reversed(children))
    if found is not None:
        assert check_run(m, found)
        return OracleResult(outcome="found", bound=max_len, run=found, explored=explored)
    return OracleResult(outcome="none_up_to", bound=max_len, explored=explored)


def verify_objective(m: Mpta, run: TimedRun, obj: Objective) -> bool:
    cost = run_cost(m, run)
    if obj.mode == EXACT:
        return all(cost[y] == obj.target[y] for y in m.observers)
    return dominates(m, obj.target, cost, obj.margin() or None)
