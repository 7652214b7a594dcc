"""Semilinear reachability sets of monotone VASS.

The reachability set of a monotone VASS is a finite union of linear sets
base + N-combinations of period vectors.  We compute it by state
elimination over edge annotations that are themselves semilinear values:
concatenation adds components pairwise, parallel edges take unions, and a
self-loop is closed with the effective star construction

    (U_i S(v_i, P_i))*  =  {0}  u  U_{K != {}} S(sum_K v_i, {v_i} u U_K P_i).

This is the Parikh evaluation of the regular expression the elimination
would produce, computed eagerly so the alphabet never needs to be spelled
out.

Every linear component carries a witness: the transition steps realizing
its base, and for each period either a cycle (with the position in the base
path where it can be spliced in) or a pump slot of a single transition.
Witnesses make the decomposition self-certifying and let the solvers
rebuild concrete runs from algebraic answers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .budget import Budget, BudgetError
from .vass import MonotoneVass, VassTransition

Vec = tuple[int, ...]


@dataclass(frozen=True)
class Step:
    transition: VassTransition
    pump_counts: tuple[int, ...]


@dataclass(frozen=True)
class CyclePeriod:
    vector: Vec
    steps: tuple[Step, ...]
    anchor: int  # splice position in the owner's base steps


@dataclass(frozen=True)
class PumpPeriod:
    vector: Vec
    step_index: int
    pump_index: int


Period = CyclePeriod | PumpPeriod


@dataclass(frozen=True)
class LinearSet:
    base: Vec
    periods: tuple[Period, ...]
    base_steps: tuple[Step, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_pv", tuple(p.vector for p in self.periods))

    @property
    def period_vectors(self) -> tuple[Vec, ...]:
        return self._pv


@dataclass(frozen=True)
class SemilinearSet:
    dimension: int
    components: tuple[LinearSet, ...]

    def is_empty(self) -> bool:
        return not self.components


def _vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def _shift_period(p: Period, offset: int) -> Period:
    if isinstance(p, CyclePeriod):
        return replace(p, anchor=p.anchor + offset)
    return replace(p, step_index=p.step_index + offset)


def _epsilon(dim: int) -> LinearSet:
    return LinearSet(base=tuple(0 for _ in range(dim)), periods=(), base_steps=())


def _from_transition(tr: VassTransition) -> LinearSet:
    counts = tuple(0 for _ in tr.pumps)
    periods = tuple(
        PumpPeriod(vector=w, step_index=0, pump_index=i)
        for i, w in enumerate(tr.pumps)
        if any(w)
    )
    return LinearSet(
        base=tr.vector,
        periods=periods,
        base_steps=(Step(tr, counts),),
    )


def _concat(a: LinearSet, b: LinearSet) -> LinearSet:
    offset = len(a.base_steps)
    return LinearSet(
        base=_vadd(a.base, b.base),
        periods=a.periods + tuple(_shift_period(p, offset) for p in b.periods),
        base_steps=a.base_steps + b.base_steps,
    )


def _reduce_loop_components(comps: list[LinearSet], budget: Budget) -> list[LinearSet]:
    """Drop loop components expressible as sums of the others.

    Loops at one state commute additively, so if c's base is an
    N-combination of other loop bases whose periods jointly cover c's
    periods, every use of c is replaceable and star(C) = star(C \\ {c}).
    This collapses the synchronized-product blowup where every tuple of
    per-copy delays shows up as its own self-loop.

    A fast pass handles the dominant pattern (c = a + b for two smaller
    loops, dict lookups only); the exact N-combination pass then runs on
    the survivors.
    """
    kept = sorted(_dedupe(comps), key=lambda c: (sum(c.base), _sort_key(c)))

    def period_cover(c: LinearSet, used: list[LinearSet], pool: list[LinearSet]) -> bool:
        # Periods of loops actually used are unlocked; any pool loop's base
        # may additionally be spent whole inside a period's decomposition.
        have = set()
        for o in used:
            have |= set(o.period_vectors)
        want = set(c.period_vectors)
        if want <= have:
            return True
        zero = tuple(0 for _ in c.base)
        generators = tuple(have) + tuple(o.base for o in pool if any(o.base))
        return all(
            _member_quick(zero, generators, p) is not None for p in want - have
        )

    changed = True
    while changed:
        changed = False
        by_base: dict[Vec, LinearSet] = {}
        for o in kept:
            by_base.setdefault(o.base, o)
        for idx in range(len(kept) - 1, -1, -1):
            c = kept[idx]
            if not any(c.base):
                continue
            found = False
            for a in kept:
                if a is c or not any(a.base):
                    continue
                budget.spend()
                diff = tuple(x - y for x, y in zip(c.base, a.base))
                if any(v < 0 for v in diff):
                    continue
                b = by_base.get(diff)
                if b is None or b is c:
                    continue
                if period_cover(c, [a, b], [a, b]):
                    found = True
                    break
            if found:
                kept.pop(idx)
                changed = True
                break

    # Exact pass for leftovers beyond pair sums; skipped on large lists
    # where the quadratic sweep would dominate the whole computation.
    changed = len(kept) <= 40
    while changed and len(kept) > 1:
        changed = False
        for idx in range(len(kept) - 1, -1, -1):
            c = kept[idx]
            if not any(c.base):
                continue
            others = kept[:idx] + kept[idx + 1 :]
            budget.spend(len(others))
            bases = [o.base for o in others]
            zero = tuple(0 for _ in c.base)
            mult = _member_quick(zero, bases, c.base)
            if mult is None:
                continue
            providers = [o for o, k in zip(others, mult) if k]
            if period_cover(c, providers, others):
                kept = others
                changed = True
                break
    return kept


def _star_single(c: LinearSet) -> LinearSet:
    """S(v, P)+ as one linear set: at least one use, v joins the periods."""
    periods: list[Period] = list(c.periods)
    if any(c.base):
        periods.insert(0, CyclePeriod(vector=c.base, steps=c.base_steps, anchor=0))
    return LinearSet(base=c.base, periods=tuple(periods), base_steps=c.base_steps)


def _star(components: Sequence[LinearSet], dim: int, budget: Budget) -> list[LinearSet]:
    """Star of a finite union of linear sets.

    Vector addition commutes, so star(A u B) = star(A) + star(B) exactly
    and the union star is an incremental Minkowski product of single
    component stars, simplified as it grows.
    """
    comps = _reduce_loop_components(_dedupe(components), budget)
    out = [_epsilon(dim)]
    for c in sorted(comps, key=_sort_key):
        plus = _star_single(c)
        grown = list(out)
        for r in out:
            budget.spend()
            grown.append(_concat(r, plus))
        out = simplify(grown, budget)
        if len(out) > 200:
            raise BudgetError(
                f"star accumulated {len(out)} components; model too rich for the budget"
            )
    return out


def _sort_key(c: LinearSet):
    return (c.base, tuple(sorted(c.period_vectors)))


def _dedupe(components: Iterable[LinearSet]) -> list[LinearSet]:
    seen = {}
    for c in components:
        key = (c.base, tuple(sorted(set(c.period_vectors))))
        if key not in seen:
            seen[key] = c
    return [seen[k] for k in seen]


class _MemberCap(Exception):
    pass


def member_linear(
    base: Vec, periods: Sequence[Vec], x: Vec, max_nodes: Optional[int] = None
) -> Optional[tuple[int, ...]]:
    """Multiplicities a with x = base + sum a_i * periods_i over N, or None.

    Exact search: every period is non-negative and non-zero, so each
    multiplicity is bounded by the remaining slack on the period's support.
    A node cap (used by the internal simplification heuristics) raises
    _MemberCap instead of guessing.
    """
    target = tuple(xi - bi for xi, bi in zip(x, base))
    if any(v < 0 for v in target):
        return None
    ps = sorted({p for p in periods if any(p)}, key=lambda p: (-sum(p), p))
    counts = {}
    memo = set()
    nodes = 0

    def search(idx: int, rem: Vec) -> bool:
        nonlocal nodes
        nodes += 1
        if max_nodes is not None and nodes > max_nodes:
            raise _MemberCap()
        if all(v == 0 for v in rem):
            for j in range(idx, len(ps)):
                counts[j] = counts.get(j, 0)
            return True
        if idx == len(ps):
            return False
        key = (idx, rem)
        if key in memo:
            return False
        p = ps[idx]
        cap = min(rem[i] // p[i] for i in range(len(p)) if p[i] > 0)
        for a in range(cap, -1, -1):
            nxt = tuple(r - a * pi for r, pi in zip(rem, p))
            if any(v < 0 for v in nxt):
                continue
            counts[idx] = a
            if search(idx + 1, nxt):
                return True
        memo.add(key)
        return False

    if search(0, target):
        by_vec = {}
        for j, p in enumerate(ps):
            by_vec[p] = counts.get(j, 0)
        full = []
        for p in periods:
            if any(p) and by_vec.get(p, 0):
                full.append(by_vec.pop(p))
            else:
                full.append(0)
        return tuple(full)
    return None


def _member_quick(base: Vec, periods: Sequence[Vec], x: Vec) -> Optional[tuple[int, ...]]:
    """Capped membership used by simplification; None also on cap (sound:
    a missed merge only keeps an extra component)."""
    try:
        return member_linear(base, periods, x, max_nodes=3000)
    except _MemberCap:
        return None


def semilinear_member(s: SemilinearSet, x: Sequence[int]) -> bool:
    x = tuple(int(v) for v in x)
    if len(x) != s.dimension:
        raise ValueError(f"dimension mismatch: set is {s.dimension}-dimensional")
    return any(
        member_linear(c.base, c.period_vectors, x) is not None for c in s.components
    )


def _subsumed(a: LinearSet, b: LinearSet) -> bool:
    """Certified containment S(a) <= S(b): base of a lies in S(b) and every
    period of a is an N-combination of b's periods."""
    ab, bb = a.base, b.base
    for x, y in zip(ab, bb):
        if x < y:
            return False
    bpv = b.period_vectors
    if not bpv:
        if ab != bb or a.period_vectors:
            return False
        return True
    if _member_quick(bb, bpv, ab) is None:
        return False
    bset = set(bpv)
    zero = None
    for p in a.period_vectors:
        if p in bset:
            continue
        if zero is None:
            zero = tuple(0 for _ in ab)
        if _member_quick(zero, bpv, p) is None:
            return False
    return True


def simplify(components: Sequence[LinearSet], budget: Budget) -> list[LinearSet]:
    """Drop duplicates and certified-subsumed components.

    Only removals: merging components would invalidate the step witnesses,
    so a union that happens to be a single linear set may stay split (the
    contract is equality as a set of vectors, not minimality).
    """
    comps = _dedupe(components)
    comps.sort(key=_sort_key)
    if len(comps) > 1000:
        # Quadratic subsumption would dwarf everything else at this size.
        return comps
    kept: list[LinearSet] = []
    for c in comps:
        budget.spend()
        if any(_subsumed(c, k) for k in kept):
            continue
        kept = [k for k in kept if not _subsumed(k, c)]
        kept.append(c)
    kept.sort(key=_sort_key)
    return kept


_SRC = ("__src__",)
_SNK = ("__snk__",)


def reach_semilinear(vass: MonotoneVass, budget: Optional[Budget] = None) -> SemilinearSet:
    """Semilinear decomposition of the reachability set, with witnesses.

    State elimination: a synthetic source/sink pair isolates the initial and
    final states, interior states are removed cheapest-first, and the value
    on the surviving source-to-sink edge is the answer.
    """
    budget = budget or Budget()
    dim = vass.dimension
    edges: dict[tuple, list[LinearSet]] = {}

    def add(p, q, comps: Iterable[LinearSet]):
        if (p, q) not in edges:
            edges[(p, q)] = []
        edges[(p, q)].extend(comps)

    states = set()
    for tr in vass.transitions:
        states.add(tr.source)
        states.add(tr.target)
        add(tr.source, tr.target, [_from_transition(tr)])
    states.add(vass.initial)
    for f in vass.finals:
        states.add(f)
    add(_SRC, vass.initial, [_epsilon(dim)])
    for f in sorted(vass.finals, key=repr):
        add(f, _SNK, [_epsilon(dim)])

    def degree(q):
        ins = sum(1 for (p, r) in edges if r == q and p != q)
        outs = sum(1 for (p, r) in edges if p == q and r != q)
        return ins * outs

    remaining = sorted(states, key=repr)
    while remaining:
        remaining.sort(key=lambda q: (degree(q), repr(q)))
        q = remaining.pop(0)
        loop = edges.pop((q, q), [])
        star_comps = _star(simplify(loop, budget), dim, budget) if loop else [_epsilon(dim)]
        ins = [(p, edges.pop((p, q)))
               for p in sorted({p for (p, r) in edges if r == q and p != q}, key=repr)]
        outs = [(r, edges.pop((q, r)))
                for r in sorted({r for (p, r) in edges if p == q and r != q}, key=repr)]
        for p, acomps in ins:
            for r, bcomps in outs:
                new = []
                for a in acomps:
                    for c in star_comps:
                        ac = _concat(a, c)
                        for b in bcomps:
                            budget.spend()
                            new.append(_concat(ac, b))
                add(p, r, new)
        for key in [(p, r) for (p, r) in edges if q in (p, r)]:
            edges.pop(key)
        # Keep parallel-edge unions tame as we go; a union that stays huge
        # after simplification is over budget by definition.
        for key in list(edges):
            if len(edges[key]) > 24:
                edges[key] = simplify(edges[key], budget)
            if len(edges[key]) > 1000:
                raise BudgetError(
                    f"elimination produced a union of {len(edges[key])} linear sets"
                )

    final = simplify(edges.get((_SRC, _SNK), []), budget)
    return SemilinearSet(dimension=dim, components=tuple(final))


def expand_members(s: SemilinearSet, cap: int) -> set[Vec]:
    """All members with entries <= cap (test oracle by direct expansion)."""
    out: set[Vec] = set()
    for c in s.components:
        stack = [(c.base, 0)]
        while stack:
            vec, pi = stack.pop()
            if any(v > cap for v in vec):
                continue
            if pi == len(c.periods):
                out.add(vec)
                continue
            p = c.period_vectors[pi]
            cur = vec
            while all(v <= cap for v in cur):
                stack.append((cur, pi + 1))
                if not any(p):
                    break
                cur = _vadd(cur, p)
    return out


def reconstruct_steps(comp: LinearSet, multipliers: Sequence[int]) -> list[Step]:
    """Base steps with each period applied `multipliers` times.

    Pump periods raise a pump count on their step; cycle periods splice
    copies of their step cycle at the anchor position.
    """
    if len(multipliers) != len(comp.periods):
        raise ValueError("need one multiplier per period")
    steps = list(comp.base_steps)
    for p, k in zip(comp.periods, multipliers):
        if isinstance(p, PumpPeriod) and k:
            old = steps[p.step_index]
            counts = list(old.pump_counts)
            counts[p.pump_index] += k
            steps[p.step_index] = Step(old.transition, tuple(counts))
    inserts: list[tuple[int, list[Step]]] = []
    for p, k in zip(comp.periods, multipliers):
        if isinstance(p, CyclePeriod) and k:
            inserts.append((p.anchor, list(p.steps) * k))
    for anchor, chunk in sorted(inserts, key=lambda t: t[0], reverse=True):
        steps[anchor:anchor] = chunk
    return steps


def replay_steps(vass: MonotoneVass, steps: Sequence[Step]) -> tuple[Vec, list]:
    """Validate a step sequence against the VASS; return (sum, labels)."""
    state = vass.initial
    total = tuple(0 for _ in range(vass.dimension))
    labels = []
    for step in steps:
        tr = step.transition
        if tr.source != state:
            raise ValueError("witness step does not start at the current state")
        vec = tr.vector
        for count, pump in zip(step.pump_counts, tr.pumps):
            if count:
                vec = tuple(v + count * w for v, w in zip(vec, pump))
        total = _vadd(total, vec)
        labels.append(tr.label)
        state = tr.target
    if state not in vass.finals:
        raise ValueError("witness does not end in a final state")
    return total, labels


def verify_component(vass: MonotoneVass, comp: LinearSet) -> bool:
    """Witness check: the base replays to its vector and the base plus each
    single period replays to base + period."""
    total, _ = replay_steps(vass, comp.base_steps)
    if total != comp.base:
        return False
    for i, p in enumerate(comp.periods):
        mult = [0] * len(comp.periods)
        mult[i] = 1
        steps = reconstruct_steps(comp, mult)
        total, _ = replay_steps(vass, steps)
        if total != _vadd(comp.base, p.vector):
            return False
    return True
