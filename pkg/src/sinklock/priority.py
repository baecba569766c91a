"""Per-class priority orders, the priority digraph, and the driven-by check.

A request-granting mechanism is *driven* by a family of per-class strict
partial orders when, for every class ``r``:

1. only ``≺_r``-maximal requesters are granted units of ``r``;
2. every sub-order reached by repeatedly deleting a maximal element (that is,
   every down-set) has maxima whose requests of ``r`` fit in its capacity.

It is deadlock-free exactly when it is driven by orders whose priority
digraph (the union of all covering pairs ``i -> j``, ``i ≺_r j``) is acyclic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from sinklock.engine import ResourceModel
from sinklock.orientation import CapExceeded, Orientation, find_cycle

DOWNSET_CAP = 20


class OrderError(ValueError):
    """Malformed partial order or order family."""


def _closure(ground: frozenset[int], pairs: Iterable[tuple[int, int]]) -> frozenset[tuple[int, int]]:
    above: dict[int, set[int]] = {i: set() for i in ground}
    for lo, hi in pairs:
        above[lo].add(hi)
    closed = set()
    for start in ground:
        seen: set[int] = set()
        stack = list(above[start])
        while stack:
            j = stack.pop()
            if j not in seen:
                seen.add(j)
                stack.extend(above[j])
        closed.update((start, j) for j in seen)
    return frozenset(closed)


def _reduction(closure: frozenset[tuple[int, int]]) -> frozenset[tuple[int, int]]:
    above: dict[int, set[int]] = {}
    for lo, hi in closure:
        above.setdefault(lo, set()).add(hi)
    return frozenset(
        (lo, hi)
        for lo, hi in closure
        if not any(hi in above.get(z, ()) for z in above[lo] if z != hi)
    )


@dataclass(frozen=True)
class PartialOrder:
    """A strict partial order stored as its ground set and covering pairs.

    ``(lo, hi)`` in ``covers`` means ``lo ≺ hi`` with nothing in between;
    maximal elements have priority.
    """

    ground: frozenset[int]
    covers: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "ground", frozenset(self.ground))
        object.__setattr__(self, "covers", frozenset(tuple(c) for c in self.covers))
        for lo, hi in self.covers:
            if lo not in self.ground or hi not in self.ground:
                raise OrderError(f"pair {lo} < {hi} leaves the ground set")
        cycle = find_cycle(sorted(self.ground), self.covers)
        if cycle is not None:
            raise OrderError(f"order contains a cycle {cycle}, so it is not irreflexive")
        redundant = self.covers - _reduction(self.closure)
        if redundant:
            raise OrderError(f"pairs {sorted(redundant)} are implied by transitivity, not covering pairs")

    @classmethod
    def from_pairs(cls, ground: Iterable[int], pairs: Iterable[tuple[int, int]]) -> "PartialOrder":
        """Order generated by arbitrary ``lo ≺ hi`` pairs (transitively closed)."""
        g = frozenset(ground)
        pairs = [tuple(p) for p in pairs]
        cycle = find_cycle(sorted(g), pairs)
        if cycle is not None:
            raise OrderError(f"pairs contain a cycle {cycle}")
        for lo, hi in pairs:
            if lo not in g or hi not in g:
                raise OrderError(f"pair {lo} < {hi} leaves the ground set")
        return cls(g, _reduction(_closure(g, pairs)))

    @classmethod
    def chain(cls, ascending: Iterable[int]) -> "PartialOrder":
        """Linear order ``ascending[0] ≺ ascending[1] ≺ ...``."""
        seq = list(ascending)
        return cls(frozenset(seq), frozenset(zip(seq, seq[1:])))

    @cached_property
    def closure(self) -> frozenset[tuple[int, int]]:
        return _closure(self.ground, self.covers)

    def less(self, i: int, j: int) -> bool:
        return (i, j) in self.closure

    def maxima(self, within: Iterable[int] | None = None) -> frozenset[int]:
        """Maximal elements of the order restricted to ``within``."""
        members = self.ground if within is None else self.ground & frozenset(within)
        dominated = {lo for lo, hi in self.closure if lo in members and hi in members}
        return frozenset(members - dominated)

    def restrict(self, subset: Iterable[int]) -> "PartialOrder":
        keep = self.ground & frozenset(subset)
        return PartialOrder(keep, _reduction(frozenset((a, b) for a, b in self.closure if a in keep and b in keep)))


def down_sets(order: PartialOrder, cap: int = DOWNSET_CAP) -> list[frozenset[int]]:
    """Every sub-order reachable by repeatedly deleting a maximal element.

    These are exactly the down-sets of the order, the full ground set and
    the empty set included.
    """
    if len(order.ground) > cap:
        raise CapExceeded(f"down-set enumeration capped at {cap} elements, got {len(order.ground)}")
    start = order.ground
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for s in frontier:
            for top in order.maxima(s):
                t = s - {top}
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


@dataclass(frozen=True)
class OrderFamily:
    orders: Mapping[int, PartialOrder]

    def __post_init__(self):
        object.__setattr__(self, "orders", dict(sorted(self.orders.items())))

    @property
    def processes(self) -> frozenset[int]:
        return frozenset().union(*(o.ground for o in self.orders.values()))

    def validate_against(self, model: ResourceModel) -> None:
        for r, order in self.orders.items():
            if r not in model.capacity:
                raise OrderError(f"family orders unknown class {r}")
            if order.ground != frozenset(model.requesters(r)):
                raise OrderError(
                    f"class {r}: ground set {sorted(order.ground)} differs from requesters {model.requesters(r)}"
                )
        missing = [r for r in model.classes if model.requesters(r) and r not in self.orders]
        if missing:
            raise OrderError(f"family lacks orders for classes {missing}")

    def to_json(self) -> str:
        return json.dumps(
            [
                {"class_id": r, "ground": sorted(o.ground), "covers": sorted([lo, hi] for lo, hi in o.covers)}
                for r, o in self.orders.items()
            ]
        )

    @classmethod
    def from_json(cls, text: str) -> "OrderFamily":
        return cls({d["class_id"]: PartialOrder(frozenset(d["ground"]), frozenset(map(tuple, d["covers"]))) for d in json.loads(text)})


@dataclass(frozen=True)
class PriorityDigraph:
    vertices: frozenset[int]
    arcs: frozenset[tuple[int, int]]


def build_priority_digraph(fam: OrderFamily, vertices: Iterable[int] = ()) -> PriorityDigraph:
    arcs = frozenset().union(*(o.covers for o in fam.orders.values()))
    return PriorityDigraph(fam.processes | frozenset(vertices), arcs)


def check_acyclic(d: PriorityDigraph) -> tuple[bool, list[int] | None]:
    """``(True, None)`` when acyclic, otherwise ``(False, cycle)``."""
    cycle = find_cycle(sorted(d.vertices), d.arcs)
    return cycle is None, cycle


@dataclass
class DrivenByReport:
    condition1_ok: bool = True
    condition1_violations: list[tuple[int, int]] = field(default_factory=list)
    condition2_ok: bool = True
    condition2_violation: tuple[int, frozenset[int], int] | None = None
    acyclic: bool = True
    cycle: list[int] | None = None

    @property
    def ok(self) -> bool:
        return self.condition1_ok and self.condition2_ok and self.acyclic


def _grant_pairs(model: ResourceModel, grants) -> list[tuple[int, int]]:
    pairs = []
    for g in grants:
        if isinstance(g, tuple):
            pairs.append(g)
        else:
            pairs.extend((g, r) for r, x in sorted(model.requests[g].items()) if x > 0)
    return pairs


def check_driven_by(model: ResourceModel, fam: OrderFamily, grants=(), cap: int = DOWNSET_CAP) -> DrivenByReport:
    """Check both driven-by conditions and acyclicity at one instant.

    ``grants`` lists what was granted at this instant, either as
    ``(process, class)`` pairs or as bare process ids (meaning every class the
    process requests).
    """
    fam.validate_against(model)
    report = DrivenByReport()
    for i, r in _grant_pairs(model, grants):
        order = fam.orders.get(r)
        if order is None or i not in order.maxima():
            report.condition1_ok = False
            report.condition1_violations.append((i, r))
    for r, order in fam.orders.items():
        if len(order.ground) > cap:
            raise CapExceeded(f"class {r}: {len(order.ground)} requesters exceed the down-set cap {cap}")
        for ds in down_sets(order, cap):
            load = sum(model.requests[i][r] for i in order.maxima(ds))
            if load > model.capacity[r]:
                report.condition2_ok = False
                report.condition2_violation = (r, ds, load)
                break
        if not report.condition2_ok:
            break
    report.acyclic, report.cycle = check_acyclic(build_priority_digraph(fam))
    return report


def restrict_model(model: ResourceModel, alive: Iterable[int]) -> ResourceModel:
    keep = set(alive)
    m = model.copy()
    for i in list(m.requests):
        if i not in keep:
            m.requests.pop(i)
            m.grants.pop(i, None)
    return m


def orientation_as_order_family(o: Orientation, model: ResourceModel) -> OrderFamily:
    """Two-element order per edge class: the arc head (sink side) is maximal.

    Classes whose other endpoint is no longer in ``model`` keep a one-element
    ground set.
    """
    orders = {}
    for r in model.classes:
        edge = model.edges.get(r)
        if edge is None or r >= o.base.m or o.base.edges[r] != edge:
            raise OrderError(f"class {r} does not match edge {r} of the orientation")
        ground = frozenset(model.requesters(r))
        if not ground:
            continue
        t, h = o.arcs[r]
        covers = frozenset({(t, h)}) if {t, h} <= ground else frozenset()
        orders[r] = PartialOrder(ground, covers)
    return OrderFamily(orders)


def family_from_completion(model: ResourceModel, finish: Mapping[int, float]) -> OrderFamily:
    """Orders read off a run: ``i ≺_r j`` when ``j`` used class ``r`` before ``i``.

    Processes finishing at the same time, or not at all, are incomparable.
    """
    inf = float("inf")
    orders = {}
    for r in model.classes:
        ground = model.requesters(r)
        if not ground:
            continue
        pairs = [
            (i, j)
            for i in ground
            for j in ground
            if finish.get(j, inf) < finish.get(i, inf)
        ]
        orders[r] = PartialOrder.from_pairs(ground, pairs)
    return OrderFamily(orders)


@dataclass
class OracleResult:
    completes: bool
    states: int
    stuck: tuple[frozenset[int], frozenset[tuple[int, int, int]]] | None = None


def schedule_oracle(model: ResourceModel, fam: OrderFamily, max_states: int = 200_000) -> OracleResult:
    """Explore every grant/release schedule of an RGM obeying ``fam``.

    A schedule may grant a requester its outstanding units of ``r`` when it is
    maximal in ``≺_r`` among unfinished processes and the units are free, and
    may retire a fully granted process. The result reports whether some
    reachable state has unfinished processes and no enabled move.
    """
    procs = frozenset(model.processes)
    requests = model.requests
    cap = model.capacity

    def moves(remaining, held):
        holding: dict[int, dict[int, int]] = {}
        used: dict[int, int] = {}
        for i, r, u in held:
            holding.setdefault(i, {})[r] = u
            used[r] = used.get(r, 0) + u
        out = []
        for i in sorted(remaining):
            have = holding.get(i, {})
            need = {r: x - have.get(r, 0) for r, x in requests[i].items() if x > have.get(r, 0)}
            if not need:
                out.append((remaining - {i}, frozenset(h for h in held if h[0] != i)))
                continue
            for r, units in need.items():
                if i in fam.orders[r].maxima(remaining) and cap[r] - used.get(r, 0) >= units:
                    nh = frozenset(h for h in held if h[:2] != (i, r)) | {(i, r, requests[i][r])}
                    out.append((remaining, nh))
        return out

    start = (procs, frozenset())
    seen = {start}
    stack = [start]
    while stack:
        state = stack.pop()
        nxt = moves(*state)
        if not nxt and state[0]:
            return OracleResult(False, len(seen), state)
        for s in nxt:
            if s not in seen:
                if len(seen) >= max_states:
                    raise CapExceeded(f"schedule oracle exceeded {max_states} states")
                seen.add(s)
                stack.append(s)
    return OracleResult(True, len(seen))


def random_instance(rng: np.random.Generator, max_procs: int = 5, max_classes: int = 4) -> tuple[ResourceModel, OrderFamily]:
    """Small singleton-class model with a random priority family.

    Families are drawn from three shapes: restrictions of one global linear
    order, independent per-class linear orders, and random partial orders.
    """
    n = int(rng.integers(1, max_procs + 1))
    c = int(rng.integers(1, max_classes + 1))
    requests: dict[int, dict[int, int]] = {}
    for i in range(n):
        chosen = [r for r in range(c) if rng.random() < 0.5] or [int(rng.integers(c))]
        requests[i] = {r: 1 for r in chosen}
    model = ResourceModel({r: 1 for r in range(c)}, requests)
    shape = int(rng.integers(3))
    global_rank = [int(x) for x in rng.permutation(n)]
    orders = {}
    for r in range(c):
        ground = model.requesters(r)
        if not ground:
            continue
        if shape == 0:
            orders[r] = PartialOrder.chain(sorted(ground, key=global_rank.index))
        elif shape == 1:
            orders[r] = PartialOrder.chain([ground[k] for k in rng.permutation(len(ground))])
        else:
            perm = [ground[k] for k in rng.permutation(len(ground))]
            pairs = [(perm[a], perm[b]) for a in range(len(perm)) for b in range(a + 1, len(perm)) if rng.random() < 0.6]
            orders[r] = PartialOrder.from_pairs(ground, pairs)
    return model, OrderFamily(orders)
