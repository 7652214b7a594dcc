"""Affine and quadratic forms over the period-multiplicity unknowns.

The geometric engines substitute each simplex vertex coordinate by an
affine form base + sum(n_l * period_l) in the integer unknowns n.  Linear
atoms keep exact rational coefficients; strict comparisons are rewritten
non-strictly after scaling to integer coefficients (the unknowns and all
coordinate values are integers, so f > 0 iff f >= 1 once f has integer
coefficients).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Aff = tuple[Fraction, tuple[Fraction, ...]]  # constant + coefficients over n


def aff_const(c, k: int) -> Aff:
    return (Fraction(c), tuple(Fraction(0) for _ in range(k)))


def aff_add(a: Aff, b: Aff) -> Aff:
    return (a[0] + b[0], tuple(x + y for x, y in zip(a[1], b[1])))


def aff_sub(a: Aff, b: Aff) -> Aff:
    return (a[0] - b[0], tuple(x - y for x, y in zip(a[1], b[1])))


def aff_scale(a: Aff, s) -> Aff:
    s = Fraction(s)
    return (a[0] * s, tuple(x * s for x in a[1]))


def aff_eval(a: Aff, n: Sequence[int]) -> Fraction:
    return a[0] + sum((c * v for c, v in zip(a[1], n)), Fraction(0))


def aff_is_const(a: Aff) -> bool:
    return all(c == 0 for c in a[1])


@dataclass(frozen=True)
class LinAtom:
    """coeffs . n  op  rhs with op in {<=, >=, ==}."""

    coeffs: tuple[Fraction, ...]
    op: str
    rhs: Fraction

    def holds(self, n: Sequence[int]) -> bool:
        lhs = sum((c * v for c, v in zip(self.coeffs, n)), Fraction(0))
        if self.op == "<=":
            return lhs <= self.rhs
        if self.op == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class QuadForm:
    """sum q[i][j] n_i n_j + lin . n + const (q upper-triangular keyed)."""

    quad: tuple[tuple[int, int, Fraction], ...]
    lin: tuple[Fraction, ...]
    const: Fraction

    def eval(self, n: Sequence[int]) -> Fraction:
        total = self.const + sum((c * v for c, v in zip(self.lin, n)), Fraction(0))
        for i, j, c in self.quad:
            total += c * n[i] * n[j]
        return total

    def is_linear(self) -> bool:
        return not self.quad


@dataclass(frozen=True)
class QuadAtom:
    form: QuadForm
    op: str  # "<=", ">=", "==" against zero

    def holds(self, n: Sequence[int]) -> bool:
        v = self.form.eval(n)
        if self.op == "<=":
            return v <= 0
        if self.op == ">=":
            return v >= 0
        return v == 0


def quad_from_aff(a: Aff) -> QuadForm:
    return QuadForm(quad=(), lin=a[1], const=a[0])


def quad_mul(a: Aff, b: Aff) -> QuadForm:
    k = len(a[1])
    quad: dict[tuple[int, int], Fraction] = {}
    for i, ca in enumerate(a[1]):
        if ca == 0:
            continue
        for j, cb in enumerate(b[1]):
            if cb == 0:
                continue
            key = (i, j) if i <= j else (j, i)
            quad[key] = quad.get(key, Fraction(0)) + ca * cb
    lin = [a[0] * cb for cb in b[1]]
    for i, ca in enumerate(a[1]):
        lin[i] += ca * b[0]
    return QuadForm(
        quad=tuple((i, j, c) for (i, j), c in sorted(quad.items()) if c != 0),
        lin=tuple(lin),
        const=a[0] * b[0],
    )


def quad_add(a: QuadForm, b: QuadForm) -> QuadForm:
    quad: dict[tuple[int, int], Fraction] = {}
    for i, j, c in a.quad + b.quad:
        quad[(i, j)] = quad.get((i, j), Fraction(0)) + c
    return QuadForm(
        quad=tuple((i, j, c) for (i, j), c in sorted(quad.items()) if c != 0),
        lin=tuple(x + y for x, y in zip(a.lin, b.lin)),
        const=a.const + b.const,
    )


def quad_sub(a: QuadForm, b: QuadForm) -> QuadForm:
    return quad_add(a, quad_scale(b, -1))


def quad_scale(a: QuadForm, s) -> QuadForm:
    s = Fraction(s)
    return QuadForm(
        quad=tuple((i, j, c * s) for i, j, c in a.quad),
        lin=tuple(c * s for c in a.lin),
        const=a.const * s,
    )


def _scale_to_integers(values: Sequence[Fraction]) -> int:
    denom = 1
    for v in values:
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    return denom


def lin_atom(lhs: Aff, op: str, rhs: Aff, strict: bool = False) -> Optional[LinAtom]:
    """Build lhs op rhs; strict inequalities shift by one after integer
    scaling.  Returns None if the atom is constant and true; raises
    _FalseAtom if constant and false."""
    diff = aff_sub(rhs, lhs)  # want diff >= 0 for op "<=", etc.
    if op == "<=":
        coeffs = tuple(-c for c in diff[1])
        rhs_v = diff[0]
        a = LinAtom(coeffs, "<=", rhs_v)
    elif op == ">=":
        coeffs = tuple(c for c in aff_sub(lhs, rhs)[1])
        rhs_v = -aff_sub(lhs, rhs)[0]
        a = LinAtom(coeffs, ">=", rhs_v)
    elif op == "==":
        coeffs = aff_sub(lhs, rhs)[1]
        rhs_v = -aff_sub(lhs, rhs)[0]
        a = LinAtom(coeffs, "==", rhs_v)
    else:
        raise ValueError(op)
    if strict:
        if a.op == "==":
            raise ValueError("strict equality makes no sense")
        scale = _scale_to_integers(tuple(a.coeffs) + (a.rhs,))
        coeffs = tuple(c * scale for c in a.coeffs)
        rhs_v = a.rhs * scale
        if a.op == "<=":
            a = LinAtom(coeffs, "<=", rhs_v - 1)
        else:
            a = LinAtom(coeffs, ">=", rhs_v + 1)
    if all(c == 0 for c in a.coeffs):
        ok = a.holds(tuple(0 for _ in a.coeffs))
        if ok:
            return None
        raise _FalseAtom()
    return a


def quad_atom(form: QuadForm, op: str, strict: bool = False) -> Optional[QuadAtom]:
    if strict:
        scale = _scale_to_integers(
            tuple(c for _, _, c in form.quad) + tuple(form.lin) + (form.const,)
        )
        form = quad_scale(form, scale)
        if op == "<=":
            form = QuadForm(form.quad, form.lin, form.const + 1)
        elif op == ">=":
            form = QuadForm(form.quad, form.lin, form.const - 1)
        else:
            raise ValueError("strict equality")
    if form.is_linear() and all(c == 0 for c in form.lin):
        a = QuadAtom(form, op)
        if a.holds(tuple(0 for _ in form.lin)):
            return None
        raise _FalseAtom()
    return QuadAtom(form, op)


class _FalseAtom(Exception):
    """An emitted atom folded to a constant falsehood; drop the system."""
