"""Check random-orientation traces against the priority-order characterization.

Two order families are checked each round:

* the orientation family (arc head is maximal in its edge class), which makes
  "grant only sinks" an instance of condition 1; a round whose orientation
  contains a cycle is allowed, since only the completion family must be
  acyclic;
* the completion family read off the whole run (``i ≺_r j`` when ``j`` was
  served first), which must satisfy both conditions and be acyclic at every
  round for a deadlock-free run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sinklock.engine import workload_from_graph
from sinklock.graphs import Graph
from sinklock.orientation import Orientation, find_cycle
from sinklock.priority import (
    DrivenByReport,
    check_driven_by,
    family_from_completion,
    orientation_as_order_family,
    restrict_model,
)
from sinklock.trace import GRANTED, ORIENTATION_FIXED, RELEASED, ROUND_START, TERMINATED, Event, parse_arrow


@dataclass
class RoundCheck:
    round: int
    granted: list[int]
    orientation: DrivenByReport
    completion: DrivenByReport
    orientation_acyclic: bool

    @property
    def ok(self) -> bool:
        return self.orientation.condition1_ok and self.orientation.condition2_ok and self.completion.ok


@dataclass
class TraceReport:
    rounds: list[RoundCheck] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)
    complete: bool = False

    @property
    def ok(self) -> bool:
        return not self.errors and all(r.ok for r in self.rounds)

    def violations(self) -> list[str]:
        out = list(self.errors)
        for rc in self.rounds:
            o, c = rc.orientation, rc.completion
            for i, r in o.condition1_violations:
                out.append(f"round {rc.round}: process {i} granted class {r} without being a sink")
            for i, r in c.condition1_violations:
                out.append(f"round {rc.round}: process {i} granted class {r} ahead of its priority order")
            if not c.condition2_ok:
                r, ds, load = c.condition2_violation
                out.append(f"round {rc.round}: class {r} maxima of {sorted(ds)} request {load} units")
            if not c.acyclic:
                out.append(f"round {rc.round}: priority digraph has cycle {c.cycle}")
        return out


def _by_round(events: list[Event]) -> dict[int, list[Event]]:
    rounds: dict[int, list[Event]] = {}
    for e in events:
        if e.round is None:
            continue
        rounds.setdefault(e.round, []).append(e)
    return rounds


def verify_orientation_trace(g: Graph, events: list[Event]) -> TraceReport:
    report = TraceReport()
    base = workload_from_graph(g)
    rounds = _by_round(events)
    finish: dict[int, int] = {}
    for rnd, evs in sorted(rounds.items()):
        for e in evs:
            if e.type == GRANTED:
                if e.process in finish:
                    report.errors.append(f"round {rnd}: process {e.process} granted twice")
                finish[e.process] = rnd
    alive = set(range(g.n))
    last = 0
    for rnd, evs in sorted(rounds.items()):
        if rnd != last + 1:
            report.errors.append(f"round {rnd} follows round {last}")
        last = rnd
        if not any(e.type == ROUND_START for e in evs):
            report.errors.append(f"round {rnd}: missing round_start")
        arcs: dict[tuple[int, int], tuple[int, int]] = {}
        for e in evs:
            if e.type == ORIENTATION_FIXED:
                t, h = parse_arrow(e.direction)
                if {t, h} != set(e.edge) or tuple(e.edge) not in g.edge_index:
                    report.errors.append(f"round {rnd}: bad orientation event {e.to_dict()}")
                    continue
                arcs[tuple(e.edge)] = (t, h)
        live = {(u, v) for u, v in g.edges if u in alive and v in alive}
        if set(arcs) != live:
            report.errors.append(
                f"round {rnd}: oriented edges {sorted(arcs)} differ from live edges {sorted(live)}"
            )
        granted = sorted(e.process for e in evs if e.type == GRANTED)
        stray = [i for i in granted if i not in alive]
        if stray:
            report.errors.append(f"round {rnd}: granted processes {stray} that already finished")
        released = {e.process for e in evs if e.type == RELEASED}
        terminated = {e.process for e in evs if e.type == TERMINATED}
        if released != set(granted) or terminated != set(granted):
            report.errors.append(f"round {rnd}: grants {granted} not matched by release/terminate events")
        # any completed edge not oriented this round keeps the low->high default
        full = Orientation(g, tuple(arcs.get(e, e) for e in g.edges))
        sinks = {v for v in alive if not any(t == v for t, h in arcs.values())}
        missed = sorted(sinks - set(granted))
        if missed:
            report.errors.append(f"round {rnd}: sinks {missed} were not granted")
        model = restrict_model(base, alive)
        grant_ids = [i for i in granted if i in alive]
        o_rep = check_driven_by(model, orientation_as_order_family(full, model), grant_ids)
        c_rep = check_driven_by(model, family_from_completion(model, finish), grant_ids)
        report.rounds.append(
            RoundCheck(rnd, granted, o_rep, c_rep, find_cycle(sorted(alive), arcs.values()) is None)
        )
        alive.difference_update(granted)
    report.complete = not alive
    return report
