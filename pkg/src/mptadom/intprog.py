"""Exact integer feasibility for systems of linear constraints.

Branch and bound over the exact rational LP relaxation.  To make the search
provably finite, every variable is boxed by a Borosh-Treybig style bound: if
an integer solution exists at all, one exists with entries at most
(n+1) * Hadamard bound on the subdeterminants of the augmented matrix.  The
LP relaxation prunes long before that bound matters in practice.

A node budget turns pathological instances into an explicit BudgetError,
never into a wrong verdict.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

from .budget import BudgetError
from .linprog import Constraint, OPTIMAL, solve_lp


def hadamard_box_bound(nvars: int, constraints: Sequence[Constraint]) -> int:
    """Upper bound on the entries of some solution, if any exists.

    Uses |subdeterminant| <= product of the min(m, n+1) largest row norms of
    the augmented matrix, then the classic (n+1) * Delta solution bound for
    non-negative integer solutions of Ax <= b.
    """
    norms = []
    for con in constraints:
        # Scale rational entries to a common denominator first.
        denom = 1
        for c in list(con.coeffs) + [con.rhs]:
            d = Fraction(c).denominator
            denom = denom * d // math.gcd(denom, d)
        ints = [int(Fraction(c) * denom) for c in list(con.coeffs) + [con.rhs]]
        norms.append(sum(v * v for v in ints))
    norms.sort(reverse=True)
    k = min(len(norms), nvars + 1)
    prod_sq = 1
    for s in norms[:k]:
        prod_sq *= max(s, 1)
    delta = math.isqrt(prod_sq) + 1
    return (nvars + 1) * delta


def ilp_feasible(
    nvars: int,
    constraints: Sequence[Constraint],
    upper_bounds: Optional[Sequence[Optional[int]]] = None,
    node_budget: int = 200_000,
) -> Optional[tuple[int, ...]]:
    """A non-negative integer solution of the constraint system, or None.

    ``upper_bounds`` may pin tighter per-variable caps; otherwise the
    Hadamard box applies to every variable.
    """
    if nvars == 0:
        ok = all(
            (con.op == "<=" and 0 <= con.rhs)
            or (con.op == ">=" and 0 >= con.rhs)
            or (con.op == "==" and con.rhs == 0)
            for con in constraints
        )
        return () if ok else None

    box = hadamard_box_bound(nvars, constraints)
    caps = []
    for i in range(nvars):
        cap = box
        if upper_bounds is not None and upper_bounds[i] is not None:
            cap = min(cap, upper_bounds[i])
        caps.append(cap)

    base = list(constraints)
    for i, cap in enumerate(caps):
        coeffs = [Fraction(0)] * nvars
        coeffs[i] = Fraction(1)
        base.append(Constraint(tuple(coeffs), "<=", Fraction(cap)))

    nodes = 0
    stack = [tuple(base)]
    while stack:
        nodes += 1
        if nodes > node_budget:
            raise BudgetError("integer feasibility search exceeded its node budget")
        system = stack.pop()
        res = solve_lp(nvars, system)
        if res.status != OPTIMAL:
            continue
        x = res.x
        frac_index = -1
        for i, v in enumerate(x):
            if v.denominator != 1:
                frac_index = i
                break
        if frac_index < 0:
            return tuple(int(v) for v in x)
        floor = x[frac_index].numerator // x[frac_index].denominator
        coeffs = [Fraction(0)] * nvars
        coeffs[frac_index] = Fraction(1)
        up = system + (Constraint(tuple(coeffs), ">=", Fraction(floor + 1)),)
        down = system + (Constraint(tuple(coeffs), "<=", Fraction(floor)),)
        # Explore the floor branch first for determinism.
        stack.append(up)
        stack.append(down)
    return None
