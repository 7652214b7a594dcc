"""Monotone VASS abstractions of an MPTA.

Two constructions live here.  The integer-time automaton tracks a location
and a saturated clock valuation and fires one transition per model edge,
adding delay * rate-vector to the counters.  Integer delays up to the
saturation constant are explicit transitions; delays beyond it all lead to
the fully saturated valuation, so they are folded into a single transition
carrying the base vector for delay M+1 plus a pump vector (the location's
rate vector) that may be added any number of times.  With that closure the
counter values reachable in an accepting state are exactly the costs of
integer-time accepting runs.

The simplex automaton is the synchronized product of d+1 copies: a product
transition exists per tuple of copy transitions sharing the same edge label,
so the copies run the same edge sequence at independently chosen times.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .model import Mpta


@dataclass(frozen=True)
class VassTransition:
    source: Any
    vector: tuple[int, ...]
    label: Any
    target: Any
    pumps: tuple[tuple[int, ...], ...] = ()
    # Reconstruction metadata: for the integer-time automaton a pair
    # ("t", delay) or ("sat", base_delay); for the product a tuple of those,
    # plus pump_copies naming which copy each pump vector belongs to.
    info: Any = None
    pump_copies: tuple[int, ...] = ()


@dataclass(frozen=True)
class MonotoneVass:
    dimension: int
    initial: Any
    finals: frozenset
    transitions: tuple[VassTransition, ...]
    states: tuple = ()

    def transitions_from(self, state) -> list[VassTransition]:
        return [t for t in self.transitions if t.source == state]

    def outgoing_index(self) -> dict:
        index: dict[Any, list[VassTransition]] = {}
        for t in self.transitions:
            index.setdefault(t.source, []).append(t)
        return index


def _saturate(valuation: tuple[int, ...], delay: int, cap: int) -> tuple[int, ...]:
    return tuple(min(v + delay, cap) for v in valuation)


def _guard_ok(m: Mpta, edge, clock_index, valuation) -> bool:
    for atom in edge.guard:
        v = valuation[clock_index[atom.clock]]
        if atom.op == "<=":
            if v > atom.bound:
                return False
        elif v < atom.bound:
            return False
    return True


def build_integer_time_vass(m: Mpta) -> MonotoneVass:
    """Integer-time automaton over states (location, saturated clocks)."""
    cap = m.max_clock_constant
    clock_index = {x: i for i, x in enumerate(m.clocks)}
    initial = (m.initial, tuple(0 for _ in m.clocks))
    seen = {initial}
    frontier = [initial]
    transitions: list[VassTransition] = []
    order = [initial]
    while frontier:
        state = frontier.pop()
        loc, valuation = state
        rate = m.rate_vector(loc)
        for delay in range(cap + 1):
            evolved = _saturate(valuation, delay, cap)
            for ei, edge in m.edges_from(loc):
                if not _guard_ok(m, edge, clock_index, evolved):
                    continue
                after = tuple(
                    0 if x in edge.resets else evolved[i]
                    for i, x in enumerate(m.clocks)
                )
                target = (edge.target, after)
                vector = tuple(delay * r for r in rate)
                transitions.append(
                    VassTransition(state, vector, ei, target, info=("t", delay))
                )
                if delay == cap and any(rate):
                    # Delays beyond saturation: base at cap+1, pump by rate.
                    transitions.append(
                        VassTransition(
                            state,
                            tuple((cap + 1) * r for r in rate),
                            ei,
                            target,
                            pumps=(rate,),
                            info=("sat", cap + 1),
                            pump_copies=(0,),
                        )
                    )
                if target not in seen:
                    seen.add(target)
                    order.append(target)
                    frontier.append(target)
    finals = frozenset(s for s in seen if s[0] in m.accepting)
    return MonotoneVass(
        dimension=len(m.observers),
        initial=initial,
        finals=finals,
        transitions=tuple(transitions),
        states=tuple(sorted(order)),
    )


def build_simplex_vass(m: Mpta, copies: Optional[int] = None) -> MonotoneVass:
    """Synchronized product of d+1 integer-time copies (d = observer count)."""
    z = build_integer_time_vass(m)
    d = len(m.observers)
    ncopies = copies if copies is not None else d + 1
    by_state_label: dict[Any, dict[Any, list[VassTransition]]] = {}
    for t in z.transitions:
        by_state_label.setdefault(t.source, {}).setdefault(t.label, []).append(t)

    initial = tuple(z.initial for _ in range(ncopies))
    seen = {initial}
    frontier = [initial]
    order = [initial]
    transitions: list[VassTransition] = []
    while frontier:
        state = frontier.pop()
        label_sets = []
        common = None
        for q in state:
            labels = set(by_state_label.get(q, {}))
            common = labels if common is None else (common & labels)
        for label in sorted(common or ()):
            choice_lists = [by_state_label[q][label] for q in state]
            stack = [((), (), (), ())]  # consumed copies: targets, vec, pumps, infos
            for ci, choices in enumerate(choice_lists):
                new_stack = []
                for targets, vec, pumps, infos in stack:
                    for tr in choices:
                        block_pumps = tuple(
                            _block_vector(w, ci, ncopies, d) for w in tr.pumps
                        )
                        new_stack.append(
                            (
                                targets + (tr.target,),
                                vec + tr.vector,
                                pumps
                                + tuple(
                                    (bp, ci) for bp in block_pumps
                                ),
                                infos + (tr.info,),
                            )
                        )
                stack = new_stack
            for targets, vec, pumps, infos in stack:
                pump_vecs = tuple(p for p, _ in pumps)
                pump_copies = tuple(c for _, c in pumps)
                transitions.append(
                    VassTransition(
                        state,
                        vec,
                        label,
                        targets,
                        pumps=pump_vecs,
                        info=infos,
                        pump_copies=pump_copies,
                    )
                )
                if targets not in seen:
                    seen.add(targets)
                    order.append(targets)
                    frontier.append(targets)
    finals = frozenset(s for s in seen if all(q in z.finals for q in s))
    return MonotoneVass(
        dimension=d * ncopies,
        initial=initial,
        finals=finals,
        transitions=tuple(transitions),
        states=tuple(sorted(order)),
    )


def _block_vector(w: tuple[int, ...], copy: int, ncopies: int, d: int) -> tuple[int, ...]:
    out = [0] * (ncopies * d)
    out[copy * d : (copy + 1) * d] = list(w)
    return tuple(out)


def bounded_reach(vass: MonotoneVass, cap: int) -> set[tuple[int, ...]]:
    """All counter vectors with entries <= cap reachable in a final state.

    Ground-truth BFS used by tests; pump vectors are unrolled as long as
    they stay under the cap.
    """
    index = vass.outgoing_index()
    zero = tuple(0 for _ in range(vass.dimension))
    seen = {(vass.initial, zero)}
    frontier = [(vass.initial, zero)]
    hits: set[tuple[int, ...]] = set()
    if vass.initial in vass.finals:
        hits.add(zero)
    while frontier:
        state, vec = frontier.pop()
        for tr in index.get(state, ()):  # explicit vector first
            for nxt in _pump_closure(vec, tr, cap):
                key = (tr.target, nxt)
                if key not in seen:
                    seen.add(key)
                    frontier.append(key)
                    if tr.target in vass.finals:
                        hits.add(nxt)
    # A final state reached by several routes may record vectors lazily;
    # collect from seen for completeness.
    for state, vec in seen:
        if state in vass.finals:
            hits.add(vec)
    return hits


def _pump_closure(vec, tr, cap):
    base = tuple(a + b for a, b in zip(vec, tr.vector))
    if any(v > cap for v in base):
        return
    stack = [(base, 0)]
    while stack:
        cur, pi = stack.pop()
        if pi == len(tr.pumps):
            yield cur
            continue
        pump = tr.pumps[pi]
        val = cur
        while True:
            stack.append((val, pi + 1))
            val = tuple(a + b for a, b in zip(val, pump))
            if any(v > cap for v in val):
                break
