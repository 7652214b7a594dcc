"""Exact linear programming over the rationals.

A small dense two-phase simplex with Bland's rule.  Verdict exactness is
non-negotiable downstream, so there is no floating point anywhere and no
tolerance parameter: a system is feasible or it is not.

Variables are non-negative by default; free variables are split into
positive and negative parts internally.  Optimal solutions are basic, so a
feasibility call returns a vertex of the polyhedron, which callers rely on
(integral vertices of totally unimodular systems, small supports for
convex-combination weights).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

EQ = "=="
LE = "<="
GE = ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    op: str
    rhs: Fraction


def constraint(coeffs: Sequence, op: str, rhs) -> Constraint:
    return Constraint(tuple(Fraction(c) for c in coeffs), op, Fraction(rhs))


@dataclass
class LpResult:
    status: str
    x: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None
    support: Optional[tuple[int, ...]] = None  # indices of basic original vars


class _Tableau:
    """Row-major simplex tableau; last column is the rhs."""

    def __init__(self, rows, basis, ncols):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols

    def pivot(self, r, c):
        rows = self.rows
        prow = rows[r]
        inv = Fraction(1) / prow[c]
        rows[r] = [v * inv for v in prow]
        prow = rows[r]
        for i, row in enumerate(rows):
            if i != r and row[c] != 0:
                f = row[c]
                rows[i] = [a - f * b for a, b in zip(row, prow)]
        self.basis[r] = c


def _simplex_phase(tab: _Tableau, cost: list[Fraction]) -> tuple[str, Fraction]:
    """Minimize cost·x over the tableau; Bland's rule, exact arithmetic."""
    m = len(tab.rows)
    n = tab.ncols
    # Reduced cost row: z_j - c_j bookkeeping done explicitly each pass is
    # too slow; keep an explicit objective row instead.
    obj = list(cost) + [Fraction(0)]
    for r in range(m):
        c = tab.basis[r]
        if obj[c] != 0:
            f = obj[c]
            row = tab.rows[r]
            obj = [a - f * b for a, b in zip(obj, row)]
    while True:
        enter = -1
        for j in range(n):
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            return OPTIMAL, -obj[-1]
        leave = -1
        best = None
        for r in range(m):
            a = tab.rows[r][enter]
            if a > 0:
                ratio = tab.rows[r][-1] / a
                if best is None or ratio < best or (
                    ratio == best and tab.basis[r] < tab.basis[leave]
                ):
                    best = ratio
                    leave = r
        if leave < 0:
            return UNBOUNDED, Fraction(0)
        tab.pivot(leave, enter)
        f = obj[enter]
        if f != 0:
            row = tab.rows[leave]
            obj = [a - f * b for a, b in zip(obj, row)]


def solve_lp(
    nvars: int,
    constraints: Sequence[Constraint],
    objective: Optional[Sequence] = None,
    maximize: bool = False,
    free: Sequence[int] = (),
) -> LpResult:
    """Solve min/max objective·x subject to constraints, x >= 0 except `free`.

    With objective None this is a pure feasibility check (the zero objective
    is optimized, so the returned point is a basic feasible solution).
    """
    free = set(free)
    # Map original variables to tableau columns (free vars get two columns).
    col_of = []
    ncols = 0
    for i in range(nvars):
        if i in free:
            col_of.append((ncols, ncols + 1))
            ncols += 2
        else:
            col_of.append((ncols, None))
            ncols += 1

    def expand(coeffs):
        out = [Fraction(0)] * ncols
        for i, c in enumerate(coeffs):
            c = Fraction(c)
            if c == 0:
                continue
            pos, neg = col_of[i]
            out[pos] += c
            if neg is not None:
                out[neg] -= c
        return out

    rows = []
    senses = []
    for con in constraints:
        if len(con.coeffs) != nvars:
            raise ValueError("constraint arity mismatch")
        row = expand(con.coeffs)
        rhs = Fraction(con.rhs)
        op = con.op
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
            op = {LE: GE, GE: LE, EQ: EQ}[op]
        rows.append((row, op, rhs))

    # Add slack/surplus columns, then artificials for GE/EQ rows.
    slack_cols = 0
    for _, op, _ in rows:
        if op in (LE, GE):
            slack_cols += 1
    total = ncols + slack_cols
    art_start = total
    art_count = sum(1 for _, op, _ in rows if op in (GE, EQ))
    total += art_count

    tab_rows = []
    basis = []
    si = ncols
    ai = art_start
    for row, op, rhs in rows:
        full = row + [Fraction(0)] * (total - ncols) + [rhs]
        if op == LE:
            full[si] = Fraction(1)
            basis.append(si)
            si += 1
        elif op == GE:
            full[si] = Fraction(-1)
            si += 1
            full[ai] = Fraction(1)
            basis.append(ai)
            ai += 1
        else:
            full[ai] = Fraction(1)
            basis.append(ai)
            ai += 1
        tab_rows.append(full)

    tab = _Tableau(tab_rows, basis, total)

    if art_count:
        phase1 = [Fraction(0)] * total
        for j in range(art_start, total):
            phase1[j] = Fraction(1)
        status, value = _simplex_phase(tab, phase1)
        if status != OPTIMAL or value != 0:
            return LpResult(status=INFEASIBLE)
        # Drive any artificial still in the basis out of it.
        for r in range(len(tab.rows)):
            if tab.basis[r] >= art_start:
                pivoted = False
                for j in range(art_start):
                    if tab.rows[r][j] != 0:
                        tab.pivot(r, j)
                        pivoted = True
                        break
                if not pivoted:
                    # Redundant row; harmless to leave (its rhs is 0).
                    pass
        # Freeze artificial columns at zero.
        for row in tab.rows:
            for j in range(art_start, total):
                row[j] = Fraction(0)

    if objective is None:
        cost = [Fraction(0)] * total
    else:
        coeffs = [Fraction(c) for c in objective]
        if maximize:
            coeffs = [-c for c in coeffs]
        cost = expand(coeffs) + [Fraction(0)] * (total - ncols)
    for r in range(len(tab.rows)):
        if tab.basis[r] >= art_start and tab.rows[r][-1] != 0:
            return LpResult(status=INFEASIBLE)

    status, value = _simplex_phase(tab, cost)
    if status == UNBOUNDED:
        return LpResult(status=UNBOUNDED)

    assignment = [Fraction(0)] * total
    for r, b in enumerate(tab.basis):
        assignment[b] = tab.rows[r][-1]
    x = []
    support = []
    for i in range(nvars):
        pos, neg = col_of[i]
        v = assignment[pos] - (assignment[neg] if neg is not None else 0)
        x.append(v)
        if v != 0:
            support.append(i)
    obj_value = None
    if objective is not None:
        obj_value = sum(Fraction(c) * v for c, v in zip(objective, x))
    return LpResult(status=OPTIMAL, x=tuple(x), value=obj_value, support=tuple(support))


def feasible_point(nvars: int, constraints: Sequence[Constraint], free: Sequence[int] = ()):
    """Basic feasible point of the system, or None."""
    res = solve_lp(nvars, constraints, objective=None, free=free)
    if res.status == OPTIMAL:
        return res.x
    return None


def check_point(point: Sequence, constraints: Sequence[Constraint]) -> bool:
    for con in constraints:
        lhs = sum(Fraction(c) * Fraction(v) for c, v in zip(con.coeffs, point))
        if con.op == LE and not lhs <= con.rhs:
            return False
        if con.op == GE and not lhs >= con.rhs:
            return False
        if con.op == EQ and lhs != con.rhs:
            return False
    return True
