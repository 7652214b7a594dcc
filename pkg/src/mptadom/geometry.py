"""Exact rational geometry for the three-observer engines.

Points are tuples of Fractions.  Orientation fixes the left-positive
convention: orient2d(p, q, r) > 0 means r lies to the left of the directed
line p -> q.  Every predicate here is closed-set exact (no tolerances) and
is validated in the tests against an independent LP membership oracle.

Two target shapes appear, both boxes unbounded along the third axis:

  cost-cost-reward:    x <= a  and  y <= b  and  z >= c
  reward-reward-cost:  x >= a  and  y >= b  and  z <= c

The capture region F below the target's z-level has finitely many integer
points whenever a, b >= 1 (the degenerate targets are reduced away before
the geometric engine runs; enumerating an infinite F raises instead of
silently truncating).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .linprog import Constraint, OPTIMAL, solve_lp

CCR = "cost_cost_reward"
RRC = "reward_reward_cost"

Point2 = tuple[Fraction, Fraction]
Point3 = tuple[Fraction, Fraction, Fraction]


def _f(v) -> Fraction:
    return Fraction(v)


def orient2d(p: Sequence, q: Sequence, r: Sequence) -> int:
    """Sign of the signed area of (p, q, r); +1 iff r left of p -> q."""
    det = (_f(q[0]) - _f(p[0])) * (_f(r[1]) - _f(p[1])) - (
        (_f(q[1]) - _f(p[1])) * (_f(r[0]) - _f(p[0]))
    )
    if det > 0:
        return 1
    if det < 0:
        return -1
    return 0


def _on_segment_collinear(p: Sequence, q: Sequence, r: Sequence) -> bool:
    """r on segment pq assuming collinearity."""
    return (
        min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
        and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])
    )


def segment_intersect(s1: tuple[Sequence, Sequence], s2: tuple[Sequence, Sequence]) -> bool:
    """Closed 2D segments share at least one point."""
    p1, q1 = s1
    p2, q2 = s2
    d1 = orient2d(p2, q2, p1)
    d2 = orient2d(p2, q2, q1)
    d3 = orient2d(p1, q1, p2)
    d4 = orient2d(p1, q1, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and _on_segment_collinear(p2, q2, p1):
        return True
    if d2 == 0 and _on_segment_collinear(p2, q2, q1):
        return True
    if d3 == 0 and _on_segment_collinear(p1, q1, p2):
        return True
    if d4 == 0 and _on_segment_collinear(p1, q1, q2):
        return True
    return False


@dataclass(frozen=True)
class Target3:
    kind: str  # CCR | RRC
    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        if self.kind not in (CCR, RRC):
            raise ValueError(f"unknown target kind {self.kind!r}")
        for v in (self.a, self.b, self.c):
            if v < 0:
                raise ValueError("target constants must be non-negative")

    def contains(self, p: Sequence) -> bool:
        x, y, z = (_f(v) for v in p)
        if self.kind == CCR:
            return x <= self.a and y <= self.b and z >= self.c
        return x >= self.a and y >= self.b and z <= self.c

    def is_degenerate(self) -> bool:
        """True when some face collapses onto a coordinate plane, making the
        capture region's integer points infinite (handled by reduction)."""
        if self.kind == CCR:
            return self.a == 0 or self.b == 0 or self.c == 0
        return self.a == 0 or self.b == 0 or self.c == 0


def region_f_contains(t: Target3, p: Sequence) -> bool:
    """Membership in F = {z < c and (x + a y <= a(b+1) or y + b x <= b(a+1))}."""
    x, y, z = (_f(v) for v in p)
    if x < 0 or y < 0 or z < 0:
        return False
    if z >= t.c:
        return False
    a, b = t.a, t.b
    return x + a * y <= a * (b + 1) or y + b * x <= b * (a + 1)


def projection_f_contains(t: Target3, p: Sequence) -> bool:
    x, y = _f(p[0]), _f(p[1])
    if x < 0 or y < 0:
        return False
    a, b = t.a, t.b
    return x + a * y <= a * (b + 1) or y + b * x <= b * (a + 1)


def enumerate_projection_f(t: Target3) -> list[tuple[int, int]]:
    """Integer points of the capture region's xy-projection."""
    a, b = t.a, t.b
    if a == 0 or b == 0:
        raise ValueError("projection of F has infinitely many integer points when a or b is 0")
    xmax = max(a * (b + 1), b * (a + 1) / b)
    ymax = max(b + 1, b * (a + 1))
    out = []
    x = 0
    while x <= xmax:
        y = 0
        while y <= ymax:
            if projection_f_contains(t, (x, y)):
                out.append((x, y))
            y += 1
        x += 1
    return out


def enumerate_f_points(t: Target3) -> list[tuple[int, int, int]]:
    """The finitely many integer points of F; empty when c = 0."""
    if t.c == 0:
        return []
    zmax = -(-t.c.numerator // t.c.denominator) - 1  # ceil(c) - 1
    if t.c.denominator > 1:
        zmax = t.c.numerator // t.c.denominator  # floor works for strict z < c
    base = enumerate_projection_f(t)
    return [(x, y, z) for (x, y) in base for z in range(int(zmax) + 1)]


def point_in_triangle2d(p: Sequence, q: Sequence, r: Sequence, w: Sequence) -> bool:
    """Closed membership; degenerate triangles reduce to segments/points."""
    o = orient2d(p, q, r)
    if o == 0:
        # Collinear: w must lie on one of the segments.
        return (
            (orient2d(p, q, w) == 0 and _on_segment_collinear(p, q, w))
            or (orient2d(q, r, w) == 0 and _on_segment_collinear(q, r, w))
            or (orient2d(r, p, w) == 0 and _on_segment_collinear(r, p, w))
        )
    s1, s2, s3 = orient2d(p, q, w), orient2d(q, r, w), orient2d(r, p, w)
    if o > 0:
        return s1 >= 0 and s2 >= 0 and s3 >= 0
    return s1 <= 0 and s2 <= 0 and s3 <= 0


def _face_bounds(t: Target3, axis: int):
    """The face of T supported by x=a (axis 0) or y=b (axis 1): constraints
    on the remaining two coordinates."""
    if t.kind == CCR:
        if axis == 0:
            return t.a, (Fraction(0), t.b), (t.c, None)  # x=a, y in [0,b], z >= c
        return t.b, (Fraction(0), t.a), (t.c, None)
    if axis == 0:
        return t.a, (t.b, None), (Fraction(0), t.c)  # x=a, y >= b, z in [0,c]
    return t.b, (t.a, None), (Fraction(0), t.c)


def _interval_clip(lo, hi, lo2, hi2):
    lo = lo if lo2 is None else max(lo, lo2)
    hi = hi if hi2 is None else (hi2 if hi is None else min(hi, hi2))
    return lo, hi


def segment_meets_face(t: Target3, axis: int, s: Sequence, e: Sequence) -> bool:
    """Closed 3D segment meets the face of T supported by x=a or y=b.

    Transversal crossings check the remaining coordinates at the unique
    crossing parameter; in-plane segments intersect exact parameter
    intervals (the explicit collinear handling the case analysis needs).
    """
    plane_val, other_bounds, z_bounds = _face_bounds(t, axis)
    oaxis = 1 - axis
    s = tuple(_f(v) for v in s)
    e = tuple(_f(v) for v in e)
    sa, ea = s[axis], e[axis]
    if sa == ea:
        if sa != plane_val:
            return False
        # In-plane: 1D parameter interval intersection.
        lo, hi = Fraction(0), Fraction(1)
        for coord, (blo, bhi) in ((oaxis, other_bounds), (2, z_bounds)):
            c0, c1 = s[coord], e[coord]
            if c0 == c1:
                if blo is not None and c0 < blo:
                    return False
                if bhi is not None and c0 > bhi:
                    return False
                continue
            if blo is not None:
                u = (blo - c0) / (c1 - c0)
                if c1 > c0:
                    lo = max(lo, u)
                else:
                    hi = min(hi, u)
            if bhi is not None:
                u = (bhi - c0) / (c1 - c0)
                if c1 > c0:
                    hi = min(hi, u)
                else:
                    lo = max(lo, u)
        return lo <= hi
    u = (plane_val - sa) / (ea - sa)
    if not (0 <= u <= 1):
        return False
    other = s[oaxis] + u * (e[oaxis] - s[oaxis])
    z = s[2] + u * (e[2] - s[2])
    blo, bhi = other_bounds
    if blo is not None and other < blo:
        return False
    if bhi is not None and other > bhi:
        return False
    zlo, zhi = z_bounds
    if zlo is not None and z < zlo:
        return False
    if zhi is not None and z > zhi:
        return False
    return True


def target_edge_meets_triangle(t: Target3, p: Sequence, q: Sequence, r: Sequence) -> bool:
    """The bounding edge of T over (a, b) meets the closed triangle pqr.

    Degenerate xy-projections are left to the edge-face cases (the topmost
    or bottom point over (a, b) then lies on a triangle edge).
    """
    p = tuple(_f(v) for v in p)
    q = tuple(_f(v) for v in q)
    r = tuple(_f(v) for v in r)
    corner = (t.a, t.b)
    o = orient2d(p, q, r)
    if o == 0:
        return False
    if not point_in_triangle2d(p, q, r, corner):
        return False
    # Plane through p, q, r: z over (a, b).
    ux, uy, uz = q[0] - p[0], q[1] - p[1], q[2] - p[2]
    vx, vy, vz = r[0] - p[0], r[1] - p[1], r[2] - p[2]
    nx = uy * vz - uz * vy
    ny = uz * vx - ux * vz
    nz = ux * vy - uy * vx
    z = (nx * (p[0] - t.a) + ny * (p[1] - t.b)) / nz + p[2]
    if t.kind == CCR:
        return z >= t.c
    return z <= t.c


def triangle_meets_target_concrete(
    t: Target3, p: Sequence, q: Sequence, r: Sequence
) -> bool:
    """Three-case analysis: vertex in T, an edge meets a bounding face of T,
    or the bounding edge of T meets the triangle."""
    pts = [tuple(_f(v) for v in w) for w in (p, q, r)]
    # Coincident vertices reduce the simplex; the predicates below already
    # treat degenerate triangles as segments or points.
    for w in pts:
        if t.contains(w):
            return True
    for i in range(3):
        for j in range(i + 1, 3):
            for axis in (0, 1):
                if segment_meets_face(t, axis, pts[i], pts[j]):
                    return True
    return target_edge_meets_triangle(t, *pts)


def triangle_meets_target_lp(t: Target3, p: Sequence, q: Sequence, r: Sequence) -> bool:
    """Independent ground truth: is some convex combination of p, q, r in T?

    Exact LP feasibility in the barycentric weights; the case analysis
    above is the object under test, this is the oracle.
    """
    pts = [tuple(_f(v) for v in w) for w in (p, q, r)]
    cons = [Constraint((Fraction(1), Fraction(1), Fraction(1)), "==", Fraction(1))]
    for coord in range(3):
        coeffs = tuple(pts[i][coord] for i in range(3))
        if t.kind == CCR:
            ops = ("<=", "<=", ">=")
        else:
            ops = (">=", ">=", "<=")
        bound = (t.a, t.b, t.c)[coord]
        cons.append(Constraint(coeffs, ops[coord], bound))
    res = solve_lp(3, cons)
    return res.status == OPTIMAL


def simplex_meets_target_concrete(t: Target3, vertices: Sequence[Sequence]) -> bool:
    """A <=4-vertex hull meets T iff some triangular face does (T is
    unbounded along its free axis, so interior-only contact is impossible)."""
    pts = [tuple(_f(v) for v in w) for w in vertices]
    uniq = []
    for w in pts:
        if w not in uniq:
            uniq.append(w)
    while len(uniq) < 3:
        uniq.append(uniq[-1])
    if len(uniq) == 3:
        return triangle_meets_target_concrete(t, *uniq)
    from itertools import combinations

    return any(
        triangle_meets_target_concrete(t, *face) for face in combinations(uniq, 3)
    )


def simplex_meets_target_lp(t: Target3, vertices: Sequence[Sequence]) -> bool:
    pts = [tuple(_f(v) for v in w) for w in vertices]
    k = len(pts)
    cons = [Constraint(tuple(Fraction(1) for _ in range(k)), "==", Fraction(1))]
    for coord in range(3):
        coeffs = tuple(pts[i][coord] for i in range(k))
        if t.kind == CCR:
            op = ("<=", "<=", ">=")[coord]
        else:
            op = (">=", ">=", "<=")[coord]
        bound = (t.a, t.b, t.c)[coord]
        cons.append(Constraint(coeffs, op, bound))
    return solve_lp(k, cons).status == OPTIMAL


def segment_meets_rect2d(
    lo: Point2, hi: Point2, s: Sequence, e: Sequence
) -> bool:
    """Closed 2D segment vs axis-aligned rectangle, exact parameter clip."""
    s = (_f(s[0]), _f(s[1]))
    e = (_f(e[0]), _f(e[1]))
    tlo, thi = Fraction(0), Fraction(1)
    for coord in range(2):
        c0, c1 = s[coord], e[coord]
        blo, bhi = lo[coord], hi[coord]
        if c0 == c1:
            if c0 < blo or c0 > bhi:
                return False
            continue
        u1 = (blo - c0) / (c1 - c0)
        u2 = (bhi - c0) / (c1 - c0)
        if u1 > u2:
            u1, u2 = u2, u1
        tlo = max(tlo, u1)
        thi = min(thi, u2)
    return tlo <= thi
