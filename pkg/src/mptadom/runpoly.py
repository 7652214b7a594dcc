"""Timestamp polytopes of edge sequences.

For a fixed edge sequence the valid timestamp vectors form a polyhedron cut
out by difference constraints: ordering constraints between consecutive
timestamps plus one atom per guard, measured from the last reset of the
guarded clock (index 0 stands for the fixed origin t_0 = 0).

The polytope has integral vertices (its constraint matrix is totally
unimodular), which is what makes the Caratheodory decomposition of a
rational run into at most d+1 integer runs work.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .linprog import Constraint, solve_lp, OPTIMAL
from .model import Mpta, ModelError, TimedRun, run_cost, LE as GUARD_LE


@dataclass(frozen=True)
class DifferenceAtom:
    """t_i - t_j <= c with integer c; j may be 0 (the origin)."""

    i: int
    j: int
    bound: int

    def render(self) -> str:
        left = f"t{self.i}" if self.j == 0 else f"t{self.i} - t{self.j}"
        return f"{left} <= {self.bound}"


@dataclass(frozen=True)
class DifferenceSystem:
    dimension: int
    atoms: tuple[DifferenceAtom, ...]

    def satisfied_by(self, t: Sequence[Fraction]) -> bool:
        values = (Fraction(0),) + tuple(Fraction(v) for v in t)
        return all(values[a.i] - values[a.j] <= a.bound for a in self.atoms)

    def render(self) -> str:
        return "\n".join(a.render() for a in self.atoms)


def run_constraints(m: Mpta, edges: Sequence[int]) -> DifferenceSystem:
    """Difference system whose solutions are exactly the valid timestamp
    vectors for the given edge sequence."""
    location = m.initial
    for idx in edges:
        if not (0 <= idx < len(m.edges)):
            raise ModelError(f"edge index {idx} out of range")
        e = m.edges[idx]
        if e.source != location:
            raise ModelError("edge sequence is not a path from the initial location")
        location = e.target

    atoms: list[DifferenceAtom] = []
    n = len(edges)
    # 0 <= t_1 <= t_2 <= ... <= t_n
    if n:
        atoms.append(DifferenceAtom(0, 1, 0))
        for i in range(1, n):
            atoms.append(DifferenceAtom(i, i + 1, 0))
    last_reset = {x: 0 for x in m.clocks}
    for pos, idx in enumerate(edges, start=1):
        e = m.edges[idx]
        for atom in e.guard:
            j = last_reset[atom.clock]
            if atom.op == GUARD_LE:
                atoms.append(DifferenceAtom(pos, j, atom.bound))
            else:
                atoms.append(DifferenceAtom(j, pos, -atom.bound))
        for x in e.resets:
            last_reset[x] = pos
    return DifferenceSystem(dimension=n, atoms=tuple(atoms))


def feasible(system: DifferenceSystem) -> bool:
    return solution(system) is not None


def solution(system: DifferenceSystem) -> Optional[tuple[Fraction, ...]]:
    """Some solution of the difference system, or None.

    Bellman-Ford on the constraint graph: atom t_i - t_j <= c is an edge
    j -> i of weight c; a negative cycle means infeasibility.  All weights
    are integers so the arithmetic is exact.
    """
    n = system.dimension
    dist = [0] * (n + 1)  # virtual source connects to every node at 0
    edges = [(a.j, a.i, a.bound) for a in system.atoms]
    for _ in range(n + 1):
        changed = False
        for j, i, c in edges:
            if dist[j] + c < dist[i]:
                dist[i] = dist[j] + c
                changed = True
        if not changed:
            break
    else:
        for j, i, c in edges:
            if dist[j] + c < dist[i]:
                return None
    shift = dist[0]
    return tuple(Fraction(dist[i] - shift) for i in range(1, n + 1))


def lp_constraints(system: DifferenceSystem) -> list[Constraint]:
    """The system as LP constraints over variables t_1..t_n (all >= 0)."""
    n = system.dimension
    out = []
    for a in system.atoms:
        coeffs = [Fraction(0)] * n
        if a.i > 0:
            coeffs[a.i - 1] += 1
        if a.j > 0:
            coeffs[a.j - 1] -= 1
        out.append(Constraint(tuple(coeffs), "<=", Fraction(a.bound)))
    return out


def integer_points(system: DifferenceSystem, high: int) -> list[tuple[int, ...]]:
    """All integer solutions with entries in [0, high] (entries are
    non-decreasing for systems produced by run_constraints)."""
    n = system.dimension
    if n == 0:
        return [()]
    by_index: list[list[DifferenceAtom]] = [[] for _ in range(n + 1)]
    for a in system.atoms:
        by_index[max(a.i, a.j)].append(a)
    out: list[tuple[int, ...]] = []
    point = [0] * (n + 1)

    def extend(pos: int):
        if pos > n:
            out.append(tuple(point[1:]))
            return
        for v in range(0, high + 1):
            point[pos] = v
            ok = True
            for a in by_index[pos]:
                if point[a.i] - point[a.j] > a.bound:
                    ok = False
                    break
            if ok:
                extend(pos + 1)

    extend(1)
    return out


def caratheodory_decompose(
    m: Mpta, edges: Sequence[int], timestamps: Sequence[Fraction]
) -> list[tuple[tuple[int, ...], Fraction]]:
    """Split a rational run into at most d+1 integer runs over the same
    edges whose costs combine convexly to the run's cost.

    Enumerates the integer points of the timestamp polytope inside the box
    [0, ceil(max t) + 1] and solves an exact LP for convex weights in cost
    space; the basic solution has support at most d+1.
    """
    ts = tuple(Fraction(t) for t in timestamps)
    system = run_constraints(m, edges)
    if len(ts) != system.dimension:
        raise ModelError("timestamp arity mismatch")
    if not system.satisfied_by(ts):
        raise ModelError("timestamps are not a valid run for this edge sequence")

    if all(t.denominator == 1 for t in ts):
        return [(tuple(int(t) for t in ts), Fraction(1))]

    high = max(ts) if ts else Fraction(0)
    box = int(high) + (0 if high.denominator == 1 else 1) + 1
    points = integer_points(system, box)
    if not points:
        raise ModelError("no integer points in the run polytope box")

    run = TimedRun(tuple(edges), ts)
    target = run_cost(m, run)
    observers = m.observers
    cost_of_point = []
    for p in points:
        cv = run_cost(m, TimedRun(tuple(edges), tuple(Fraction(v) for v in p)))
        cost_of_point.append(tuple(cv[y] for y in observers))

    k = len(points)
    cons = []
    for yi, y in enumerate(observers):
        cons.append(Constraint(tuple(c[yi] for c in cost_of_point), "==", target[y]))
    cons.append(Constraint(tuple(Fraction(1) for _ in points), "==", Fraction(1)))
    res = solve_lp(k, cons)
    if res.status != OPTIMAL:
        raise ModelError("convex decomposition LP infeasible; polytope box too small")
    out = [
        (points[i], res.x[i])
        for i in range(k)
        if res.x[i] != 0
    ]
    return out
