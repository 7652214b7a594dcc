"""Domination decisions when every observer is a cost, or every one a reward.

Both engines work per linear component of the simplex automaton's
reachability set.  For costs the period vectors can only hurt, so the base
vector is the optimal choice and a single exact LP over the convex weights
decides the component.  For rewards the periods are the whole point: per
support set of the convex combination, observers boosted by some period on
a support block are unconstrained (any deficit is covered by pumping that
period), the rest must be covered by the base blocks alone, and strict
positivity of the support weights is decided by maximizing the minimum
weight, never by epsilon fudging.

Every Dominated verdict carries a closed certificate: weights p_j / g, an
explicit element of the component, the integer runs realizing its blocks
over a common edge sequence, and the convex-combination run of granularity
1/g that achieves the witness cost vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .budget import Budget
from .linprog import Constraint, OPTIMAL, solve_lp
from .model import (
    COST,
    REWARD,
    CostVector,
    ModelError,
    Mpta,
    TimedRun,
    check_run,
    dominates,
    run_cost,
)
from .semilinear import LinearSet, SemilinearSet, reach_semilinear, reconstruct_steps
from .vass import MonotoneVass, build_simplex_vass

DOMINATED = "dominated"
NOT_DOMINATED = "not_dominated"


@dataclass(frozen=True)
class PureDecision:
    verdict: str
    component: Optional[int] = None
    weights: Optional[tuple[Fraction, ...]] = None
    support: Optional[tuple[int, ...]] = None
    granularity: Optional[int] = None
    witness_cost: Optional[CostVector] = None
    period_multiples: Optional[tuple[int, ...]] = None
    certificate_edges: Optional[tuple[int, ...]] = None
    certificate_runs: Optional[tuple[tuple[int, ...], ...]] = None
    certificate_run: Optional[TimedRun] = None

    @property
    def dominated(self) -> bool:
        return self.verdict == DOMINATED


def _blocks(comp_base: Sequence[int], d: int) -> list[tuple[int, ...]]:
    n = len(comp_base) // d
    return [tuple(comp_base[j * d : (j + 1) * d]) for j in range(n)]


def steps_to_integer_runs(steps, ncopies: int) -> tuple[list, list[list[int]]]:
    """Edge labels and per-copy integer timestamps from a step witness."""
    labels = []
    stamps = [[] for _ in range(ncopies)]
    clocks = [0] * ncopies
    for step in steps:
        tr = step.transition
        labels.append(tr.label)
        extra = [0] * ncopies
        for pos, copy in enumerate(tr.pump_copies):
            extra[copy] += step.pump_counts[pos]
        infos = tr.info
        for j in range(ncopies):
            kind, delay = infos[j]
            clocks[j] += delay + (extra[j] if kind == "sat" else 0)
            stamps[j].append(clocks[j])
    return labels, stamps


def _certificate(
    m: Mpta,
    comp: LinearSet,
    weights: Sequence[Fraction],
    multipliers: Sequence[int],
) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...], TimedRun, int]:
    """Rebuild the g-granular run realizing the weighted block combination."""
    d = len(m.observers)
    steps = reconstruct_steps(comp, multipliers)
    labels, stamps = steps_to_integer_runs(steps, d + 1)
    for ts in stamps:
        if not check_run(m, TimedRun(tuple(labels), tuple(Fraction(t) for t in ts))):
            raise AssertionError("certificate copy run failed validation")
    g = 1
    for w in weights:
        g = g * w.denominator // math.gcd(g, w.denominator)
    combined = tuple(
        sum((w * ts[i] for w, ts in zip(weights, stamps)), Fraction(0))
        for i in range(len(labels))
    )
    run = TimedRun(tuple(labels), combined)
    if not check_run(m, run):
        raise AssertionError("combined certificate run failed validation")
    if any((t * g).denominator != 1 for t in combined):
        raise AssertionError("combined run is not 1/g granular")
    return tuple(labels), tuple(tuple(ts) for ts in stamps), run, g


def _reach(m: Mpta, budget: Optional[Budget]) -> SemilinearSet:
    sa = build_simplex_vass(m)
    return reach_semilinear(sa, budget)


def decide_pure_costs(
    m: Mpta, gamma: CostVector, budget: Optional[Budget] = None,
    reach: Optional[SemilinearSet] = None,
) -> PureDecision:
    if any(m.partition[y] != COST for y in m.observers):
        raise ModelError("decide_pure_costs needs an all-cost partition")
    if reach is None:
        reach = _reach(m, budget)
    d = len(m.observers)
    for ci, comp in enumerate(reach.components):
        blocks = _blocks(comp.base, d)
        k = len(blocks)
        cons = [Constraint(tuple(Fraction(1) for _ in range(k)), "==", Fraction(1))]
        for yi, y in enumerate(m.observers):
            cons.append(
                Constraint(tuple(Fraction(b[yi]) for b in blocks), "<=", gamma[y])
            )
        res = solve_lp(k, cons)
        if res.status != OPTIMAL:
            continue
        weights = res.x
        witness = CostVector(
            {
                y: sum((w * Fraction(b[yi]) for w, b in zip(weights, blocks)), Fraction(0))
                for yi, y in enumerate(m.observers)
            }
        )
        assert dominates(m, gamma, witness)
        multipliers = [0] * len(comp.periods)
        edges, runs, run, g = _certificate(m, comp, weights, multipliers)
        cost = run_cost(m, run)
        assert all(cost[y] == witness[y] for y in m.observers)
        return PureDecision(
            verdict=DOMINATED,
            component=ci,
            weights=tuple(weights),
            support=tuple(i for i, w in enumerate(weights) if w > 0),
            granularity=g,
            witness_cost=witness,
            period_multiples=tuple(multipliers),
            certificate_edges=edges,
            certificate_runs=runs,
            certificate_run=run,
        )
    return PureDecision(verdict=NOT_DOMINATED)


def _support_sets(k: int):
    """Non-empty subsets of range(k), smallest first, lex within a size."""
    from itertools import combinations

    for size in range(1, k + 1):
        yield from combinations(range(k), size)


def decide_pure_rewards(
    m: Mpta, gamma: CostVector, budget: Optional[Budget] = None,
    reach: Optional[SemilinearSet] = None,
) -> PureDecision:
    if any(m.partition[y] != REWARD for y in m.observers):
        raise ModelError("decide_pure_rewards needs an all-reward partition")
    if reach is None:
        reach = _reach(m, budget)
    d = len(m.observers)
    for ci, comp in enumerate(reach.components):
        blocks = _blocks(comp.base, d)
        k = len(blocks)
        period_blocks = [_blocks(p.vector, d) for p in comp.periods]
        for support in _support_sets(k):
            boosted = set()
            for pb in period_blocks:
                for j in support:
                    for yi in range(d):
                        if pb[j][yi] > 0:
                            boosted.add(yi)
            # Variables: lambda_0..lambda_{k-1}, s; maximize s subject to
            # s <= lambda_j on the support, lambda_j = 0 off it.
            nv = k + 1
            cons = [Constraint(tuple([Fraction(1)] * k + [Fraction(0)]), "==", Fraction(1))]
            for j in range(k):
                if j not in support:
                    coeffs = [Fraction(0)] * nv
                    coeffs[j] = Fraction(1)
                    cons.append(Constraint(tuple(coeffs), "==", Fraction(0)))
                else:
                    coeffs = [Fraction(0)] * nv
                    coeffs[j] = Fraction(-1)
                    coeffs[k] = Fraction(1)
                    cons.append(Constraint(tuple(coeffs), "<=", Fraction(0)))
            for yi, y in enumerate(m.observers):
                if yi in boosted:
                    continue
                coeffs = [Fraction(blocks[j][yi]) for j in range(k)] + [Fraction(0)]
                cons.append(Constraint(tuple(coeffs), ">=", gamma[y]))
            obj = [Fraction(0)] * nv
            obj[k] = Fraction(1)
            res = solve_lp(nv, cons, objective=obj, maximize=True)
            if res.status != OPTIMAL or res.value <= 0:
                continue
            weights = res.x[:k]
            multipliers = [0] * len(comp.periods)
            for yi, y in enumerate(m.observers):
                base_part = sum(
                    (weights[j] * Fraction(blocks[j][yi]) for j in range(k)),
                    Fraction(0),
                )
                deficit = gamma[y] - base_part
                if deficit <= 0:
                    continue
                placed = False
                for li, pb in enumerate(period_blocks):
                    for j in support:
                        if pb[j][yi] > 0:
                            per_unit = weights[j] * Fraction(pb[j][yi])
                            mult = math.ceil(deficit / per_unit)
                            multipliers[li] += mult
                            placed = True
                            break
                    if placed:
                        break
                if not placed:
                    raise AssertionError("boosted observer without a boosting period")
            element_blocks = [list(b) for b in blocks]
            for li, mult in enumerate(multipliers):
                if mult:
                    for j in range(k):
                        for yi in range(d):
                            element_blocks[j][yi] += mult * period_blocks[li][j][yi]
            witness = CostVector(
                {
                    y: sum(
                        (weights[j] * Fraction(element_blocks[j][yi]) for j in range(k)),
                        Fraction(0),
                    )
                    for yi, y in enumerate(m.observers)
                }
            )
            if not dominates(m, gamma, witness):
                raise AssertionError("reward witness fails domination recheck")
            edges, runs, run, g = _certificate(m, comp, weights, multipliers)
            cost = run_cost(m, run)
            assert all(cost[y] == witness[y] for y in m.observers)
            return PureDecision(
                verdict=DOMINATED,
                component=ci,
                weights=tuple(weights),
                support=tuple(support),
                granularity=g,
                witness_cost=witness,
                period_multiples=tuple(multipliers),
                certificate_edges=edges,
                certificate_runs=runs,
                certificate_run=run,
            )
    return PureDecision(verdict=NOT_DOMINATED)


def decide_pure(m: Mpta, gamma: CostVector, budget: Optional[Budget] = None) -> PureDecision:
    kinds = set(m.partition.values())
    if kinds <= {COST}:
        return decide_pure_costs(m, gamma, budget)
    if kinds <= {REWARD}:
        return decide_pure_rewards(m, gamma, budget)
    raise ModelError("pure solver needs an all-cost or all-reward partition")
