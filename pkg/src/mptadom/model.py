"""Multi-priced timed automata: model, runs, costs, and domination orderings.

An MPTA has clocks guarded by conjunctions of ``x <= k`` / ``x >= k`` atoms
(no difference constraints) and observers that accrue location-dependent
non-negative integer rates.  Observers are partitioned into costs (upper
bounded by a query) and rewards (lower bounded).

All values are immutable after construction and every operation here is a
pure function, so everything is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .rationals import format_rational, parse_rational

COST = "cost"
REWARD = "reward"

LE = "<="
GE = ">="


class ModelError(ValueError):
    """Raised when a raw model or query description violates an invariant."""


@dataclass(frozen=True)
class GuardAtom:
    clock: str
    op: str  # "<=" or ">="
    bound: int

    def satisfied_by(self, value: Fraction) -> bool:
        if self.op == LE:
            return value <= self.bound
        return value >= self.bound


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    guard: tuple[GuardAtom, ...]
    resets: frozenset[str]


@dataclass(frozen=True)
class Mpta:
    locations: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    clocks: tuple[str, ...]
    observers: tuple[str, ...]
    partition: Mapping[str, str]  # observer -> COST | REWARD
    edges: tuple[Edge, ...]
    rates: Mapping[str, Mapping[str, int]]  # location -> observer -> rate
    max_clock_constant: int  # one above the largest guard constant
    max_rate: int

    @property
    def cost_observers(self) -> tuple[str, ...]:
        return tuple(y for y in self.observers if self.partition[y] == COST)

    @property
    def reward_observers(self) -> tuple[str, ...]:
        return tuple(y for y in self.observers if self.partition[y] == REWARD)

    def rate_vector(self, location: str) -> tuple[int, ...]:
        row = self.rates[location]
        return tuple(row[y] for y in self.observers)

    def edges_from(self, location: str) -> list[tuple[int, Edge]]:
        return [(i, e) for i, e in enumerate(self.edges) if e.source == location]

    def is_pure(self) -> bool:
        kinds = set(self.partition.values())
        return len(kinds) <= 1

    def to_json_dict(self) -> dict:
        return {
            "clocks": list(self.clocks),
            "observers": [
                {"name": y, "kind": self.partition[y]} for y in self.observers
            ],
            "locations": [
                {"name": loc, "rates": {y: self.rates[loc][y] for y in self.observers}}
                for loc in self.locations
            ],
            "initial": self.initial,
            "accepting": sorted(self.accepting),
            "edges": [
                {
                    "from": e.source,
                    "to": e.target,
                    "guard": [[a.clock, a.op, a.bound] for a in e.guard],
                    "resets": sorted(e.resets),
                }
                for e in self.edges
            ],
        }


@dataclass(frozen=True)
class TimedRun:
    """Edge indices plus absolute timestamps; t_0 = 0 is implicit."""

    edges: tuple[int, ...]
    timestamps: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.edges) != len(self.timestamps):
            raise ModelError("run needs one timestamp per edge")


@dataclass(frozen=True)
class CostVector:
    values: Mapping[str, Fraction]

    def __getitem__(self, observer: str) -> Fraction:
        return self.values[observer]

    def observers(self) -> tuple[str, ...]:
        return tuple(self.values)

    def to_json_dict(self) -> dict:
        return {y: format_rational(v) for y, v in self.values.items()}


@dataclass(frozen=True)
class DominationQuery:
    target: CostVector
    epsilon: Optional[Fraction] = None

    def __post_init__(self):
        if self.epsilon is not None and self.epsilon <= 0:
            raise ModelError("epsilon must be strictly positive")


def _require(condition: bool, message: str):
    if not condition:
        raise ModelError(message)


def validate_mpta(raw: Mapping) -> Mpta:
    """Validate a raw JSON-style description and derive model constants.

    Completes every rate map with explicit zeros, checks that guards use
    declared clocks with natural-number constants, and rejects anything
    that smells like a difference constraint.  The derived constants are
    ``max_clock_constant`` (one more than the largest guard constant, at
    least 1) and ``max_rate``.
    """
    _require(isinstance(raw, Mapping), "model must be a JSON object")
    for key in ("clocks", "observers", "locations", "initial", "accepting", "edges"):
        _require(key in raw, f"model is missing key {key!r}")

    clocks = tuple(raw["clocks"])
    _require(len(set(clocks)) == len(clocks), "duplicate clock name")
    for x in clocks:
        _require(isinstance(x, str) and x, f"bad clock name {x!r}")

    observers = []
    partition = {}
    for entry in raw["observers"]:
        _require(
            isinstance(entry, Mapping) and "name" in entry and "kind" in entry,
            "observer entries need name and kind",
        )
        name, kind = entry["name"], entry["kind"]
        _require(isinstance(name, str) and name, f"bad observer name {name!r}")
        _require(kind in (COST, REWARD), f"observer kind must be cost/reward, got {kind!r}")
        _require(name not in partition, f"duplicate observer {name!r}")
        observers.append(name)
        partition[name] = kind
    observers = tuple(observers)

    locations = []
    rates = {}
    max_rate = 0
    for entry in raw["locations"]:
        _require(isinstance(entry, Mapping) and "name" in entry, "location entries need a name")
        name = entry["name"]
        _require(isinstance(name, str) and name, f"bad location name {name!r}")
        _require(name not in rates, f"duplicate location {name!r}")
        row = {}
        declared = entry.get("rates", {})
        for y, r in declared.items():
            _require(y in partition, f"rate for unknown observer {y!r} at {name!r}")
            _require(isinstance(r, int) and not isinstance(r, bool) and r >= 0,
                     f"rate of {y!r} at {name!r} must be a natural number")
            row[y] = r
        for y in observers:
            row.setdefault(y, 0)
            max_rate = max(max_rate, row[y])
        locations.append(name)
        rates[name] = row
    locations = tuple(locations)
    location_set = set(locations)

    initial = raw["initial"]
    _require(initial in location_set, f"unknown initial location {initial!r}")
    accepting = frozenset(raw["accepting"])
    for loc in accepting:
        _require(loc in location_set, f"unknown accepting location {loc!r}")

    clock_set = set(clocks)
    edges = []
    max_const = 0
    for entry in raw["edges"]:
        _require(isinstance(entry, Mapping), "edge entries must be objects")
        for key in ("from", "to"):
            _require(key in entry, f"edge missing {key!r}")
        _require(entry["from"] in location_set, f"unknown location {entry['from']!r}")
        _require(entry["to"] in location_set, f"unknown location {entry['to']!r}")
        atoms = []
        for atom in entry.get("guard", []):
            _require(
                isinstance(atom, Sequence) and not isinstance(atom, str) and len(atom) == 3,
                f"guard atom must be [clock, op, constant], got {atom!r}",
            )
            clock, op, bound = atom
            _require(clock in clock_set, f"unknown clock {clock!r} in guard")
            _require(op in (LE, GE), f"guard operator must be <= or >=, got {op!r}")
            _require(isinstance(bound, int) and not isinstance(bound, bool) and bound >= 0,
                     f"guard constant must be a natural number, got {bound!r}")
            atoms.append(GuardAtom(clock, op, bound))
            max_const = max(max_const, bound)
        resets = frozenset(entry.get("resets", []))
        for x in resets:
            _require(x in clock_set, f"unknown clock {x!r} in resets")
        edges.append(Edge(entry["from"], entry["to"], tuple(atoms), resets))

    return Mpta(
        locations=locations,
        initial=initial,
        accepting=accepting,
        clocks=clocks,
        observers=observers,
        partition=partition,
        edges=tuple(edges),
        rates=rates,
        max_clock_constant=max_const + 1,
        max_rate=max_rate,
    )


def parse_query(raw: Mapping, m: Mpta) -> DominationQuery:
    _require(isinstance(raw, Mapping) and "target" in raw, "query needs a target")
    target = cost_vector(m, {y: parse_rational(v) for y, v in raw["target"].items()})
    epsilon = None
    if raw.get("epsilon") is not None:
        epsilon = parse_rational(raw["epsilon"])
    return DominationQuery(target=target, epsilon=epsilon)


def cost_vector(m: Mpta, values: Mapping[str, object]) -> CostVector:
    parsed = {y: parse_rational(v) for y, v in values.items()}
    if set(parsed) != set(m.observers):
        missing = set(m.observers) - set(parsed)
        extra = set(parsed) - set(m.observers)
        raise ModelError(f"cost vector keys mismatch (missing {sorted(missing)}, extra {sorted(extra)})")
    for y, v in parsed.items():
        if v < 0:
            raise ModelError(f"negative entry for observer {y!r}")
    return CostVector({y: parsed[y] for y in m.observers})


def check_run(m: Mpta, run: TimedRun) -> bool:
    """Replay a run exactly: path-connectivity, guard satisfaction, resets.

    A non-path edge sequence is an error (it is not a run at all), while a
    timing violation just returns False.
    """
    location = m.initial
    for idx in run.edges:
        if not (0 <= idx < len(m.edges)):
            raise ModelError(f"edge index {idx} out of range")
        edge = m.edges[idx]
        if edge.source != location:
            raise ModelError("edge sequence is not a path from the initial location")
        location = edge.target

    valuation = {x: Fraction(0) for x in m.clocks}
    now = Fraction(0)
    for idx, t in zip(run.edges, run.timestamps):
        t = Fraction(t)
        if t < now:
            return False
        delta = t - now
        evolved = {x: v + delta for x, v in valuation.items()}
        edge = m.edges[idx]
        for atom in edge.guard:
            if not atom.satisfied_by(evolved[atom.clock]):
                return False
        for x in edge.resets:
            evolved[x] = Fraction(0)
        valuation = evolved
        now = t
    return True


def run_cost(m: Mpta, run: TimedRun) -> CostVector:
    """Exact cost of a valid run: sum of dwell times weighted by rates."""
    if not check_run(m, run):
        raise ModelError("run is not valid for this model")
    totals = {y: Fraction(0) for y in m.observers}
    location = m.initial
    now = Fraction(0)
    for idx, t in zip(run.edges, run.timestamps):
        dwell = Fraction(t) - now
        row = m.rates[location]
        for y in m.observers:
            totals[y] += dwell * row[y]
        location = m.edges[idx].target
        now = Fraction(t)
    return CostVector(totals)


def dominates(
    m: Mpta,
    gamma: CostVector,
    other: CostVector,
    epsilon: Optional[Fraction] = None,
) -> bool:
    """True iff ``other`` dominates ``gamma`` with margin ``epsilon``.

    Costs must come in under the target by epsilon, rewards must come in
    over it; epsilon None or 0 gives plain domination.
    """
    eps = Fraction(0) if epsilon is None else Fraction(epsilon)
    if eps < 0:
        raise ModelError("epsilon must be non-negative")
    for vec in (gamma, other):
        if set(vec.values) != set(m.observers):
            raise ModelError("cost vector keys do not match the model's observers")
    for y in m.observers:
        if m.partition[y] == REWARD:
            if gamma[y] + eps > other[y]:
                return False
        else:
            if other[y] + eps > gamma[y]:
                return False
    return True


def dominating_region_atoms(m: Mpta, gamma: CostVector) -> list[tuple[str, str, Fraction]]:
    """The target region {cost vectors dominating gamma} as (observer, op, bound)."""
    atoms = []
    for y in m.observers:
        if m.partition[y] == COST:
            atoms.append((y, LE, gamma[y]))
        else:
            atoms.append((y, GE, gamma[y]))
    return atoms


def model_from_json(raw: Mapping) -> Mpta:
    return validate_mpta(raw)


def run_to_json(run: TimedRun) -> dict:
    return {
        "edges": list(run.edges),
        "timestamps": [format_rational(t) for t in run.timestamps],
    }
