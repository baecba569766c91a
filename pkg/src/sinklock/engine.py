"""Centralized random-orientation request-granting mechanism.

Every process runs one request phase: it asks for all its resources, waits
until the mechanism grants them, computes (for zero simulated time) and
releases everything. Each round the mechanism orients the conflict graph
induced on the processes still waiting and grants the sinks.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from sinklock.coins import round_coins
from sinklock.graphs import Graph
from sinklock.trace import (
    GRANTED,
    ORIENTATION_FIXED,
    RELEASED,
    ROUND_START,
    TERMINATED,
    Event,
    arrow,
)


class ResourceError(RuntimeError):
    """A grant or release would break the resource invariants."""


@dataclass
class ResourceModel:
    """Resource classes, their capacities, and per-process request/grant counts.

    ``requests[i][r]`` is the number of units of class ``r`` process ``i``
    asks for; ``grants[i][r]`` the number it currently holds.
    """

    capacity: dict[int, int]
    requests: dict[int, dict[int, int]]
    grants: dict[int, dict[int, int]] = field(default_factory=dict)
    edges: dict[int, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        for i, req in self.requests.items():
            self.grants.setdefault(i, {})
            for r, x in req.items():
                if r not in self.capacity:
                    raise ResourceError(f"process {i} requests unknown class {r}")
                if not 0 <= x <= self.capacity[r]:
                    raise ResourceError(
                        f"process {i} requests {x} units of class {r} with capacity {self.capacity[r]}"
                    )
        self.check()

    @property
    def processes(self) -> list[int]:
        return sorted(self.requests)

    @property
    def classes(self) -> list[int]:
        return sorted(self.capacity)

    def requesters(self, r: int) -> list[int]:
        return sorted(i for i, req in self.requests.items() if req.get(r, 0) > 0)

    def held(self, r: int) -> int:
        return sum(g.get(r, 0) for g in self.grants.values())

    def free(self, r: int) -> int:
        return self.capacity[r] - self.held(r)

    def outstanding(self, i: int) -> dict[int, int]:
        g = self.grants.get(i, {})
        return {r: x - g.get(r, 0) for r, x in self.requests[i].items() if x > g.get(r, 0)}

    def fully_granted(self, i: int) -> bool:
        return not self.outstanding(i)

    def grant(self, i: int, r: int, units: int) -> None:
        have = self.grants[i].get(r, 0)
        if have + units > self.requests[i].get(r, 0):
            raise ResourceError(f"grant of {units} x class {r} exceeds request of process {i}")
        if units > self.free(r):
            raise ResourceError(f"class {r} has {self.free(r)} free units, cannot grant {units} to {i}")
        self.grants[i][r] = have + units

    def grant_all(self, i: int) -> None:
        for r, units in self.outstanding(i).items():
            self.grant(i, r, units)

    def release(self, i: int) -> None:
        self.grants[i] = {}

    def retire(self, i: int) -> None:
        """Drop a finished process; it must hold nothing."""
        if any(self.grants.get(i, {}).values()):
            raise ResourceError(f"process {i} retired while holding resources")
        self.requests.pop(i)
        self.grants.pop(i, None)

    def check(self) -> None:
        for r, cap in self.capacity.items():
            if self.held(r) > cap:
                raise ResourceError(f"class {r} over-granted: {self.held(r)} > {cap}")
        for i, g in self.grants.items():
            for r, units in g.items():
                if units > self.requests.get(i, {}).get(r, 0):
                    raise ResourceError(f"process {i} holds more of class {r} than requested")

    def copy(self) -> "ResourceModel":
        return copy.deepcopy(self)


def workload_from_graph(g: Graph) -> ResourceModel:
    """One single-unit class per edge, requested by both endpoints."""
    requests: dict[int, dict[int, int]] = {v: {} for v in range(g.n)}
    for r, (u, v) in enumerate(g.edges):
        requests[u][r] = 1
        requests[v][r] = 1
    return ResourceModel(
        capacity={r: 1 for r in range(g.m)},
        requests=requests,
        edges=dict(enumerate(g.edges)),
    )


@dataclass(frozen=True)
class WaitForDigraph:
    vertices: tuple[int, ...]
    arcs: frozenset[tuple[int, int]]


def build_wait_for(model: ResourceModel) -> WaitForDigraph:
    """Arc ``i -> j`` when ``i`` still needs a class of which ``j`` holds units."""
    arcs = set()
    for i in model.processes:
        for r in model.outstanding(i):
            for j in model.processes:
                if j != i and model.grants.get(j, {}).get(r, 0) > 0:
                    arcs.add((i, j))
    return WaitForDigraph(tuple(model.processes), frozenset(arcs))


@dataclass
class RunResult:
    trace: list[Event]
    rounds: int
    complete: bool
    sink_sets: list[frozenset[int]]
    grant_round: dict[int, int]


def simulate_random_orientation_rgm(g: Graph, seed: int, max_rounds: int | None = None) -> RunResult:
    """Run the random-orientation mechanism until every process is served.

    Coins come from the shared ``(seed, round, edge index)`` schedule. The run
    stops after ``max_rounds`` rounds (default ``10 * n``) and reports
    ``complete=False`` if processes are still waiting.
    """
    if max_rounds is None:
        max_rounds = 10 * g.n
    model = workload_from_graph(g)
    alive = set(range(g.n))
    trace: list[Event] = []
    sink_sets: list[frozenset[int]] = []
    grant_round: dict[int, int] = {}
    rnd = 0
    while alive and rnd < max_rounds:
        rnd += 1
        trace.append(Event(ROUND_START, rnd))
        coins = round_coins(seed, rnd, g.m)
        has_out = set()
        for idx, (u, v) in enumerate(g.edges):
            if u in alive and v in alive:
                t, h = (u, v) if coins[idx] == 0 else (v, u)
                has_out.add(t)
                trace.append(Event(ORIENTATION_FIXED, rnd, edge=(u, v), direction=arrow(t, h)))
        granted = sorted(alive - has_out)
        if not g.is_independent(granted):
            raise AssertionError(f"round {rnd}: granted set {granted} is not independent")
        for i in granted:
            model.grant_all(i)
            model.check()
            trace.append(Event(GRANTED, rnd, process=i))
        for i in granted:
            model.release(i)
            trace.append(Event(RELEASED, rnd, process=i))
            trace.append(Event(TERMINATED, rnd, process=i))
            grant_round[i] = rnd
        alive.difference_update(granted)
        sink_sets.append(frozenset(granted))
    return RunResult(trace, rnd, not alive, sink_sets, grant_round)
