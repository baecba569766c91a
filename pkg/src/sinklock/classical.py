"""The classical prevention strategy: acquire resource classes in a fixed
linear order, cast as a mechanism driven by per-class priority orders.

``class_order`` lists classes from ``≺``-smallest to ``≺``-largest. A process
waiting on class ``r`` has already been granted every class above ``r``, so
acquisition proceeds from the largest requested class downward. At each step
the set ``C_r`` holds processes whose next class is ``r``, and ``≺_r`` is the
linear order on the requesters of ``r`` in which processes further along the
acquisition sequence rank higher (fully granted processes highest); ties are
broken by ascending process id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sinklock.engine import ResourceModel
from sinklock.priority import OrderFamily, PartialOrder, check_driven_by
from sinklock.trace import GRANTED, RELEASED, ROUND_START, TERMINATED, Event


@dataclass
class Step:
    step: int
    model: ResourceModel
    family: OrderFamily
    waiting_on: dict[int, int | None]
    grants: list[tuple[int, int]]


@dataclass
class ClassicalRun:
    trace: list[Event]
    steps: list[Step]
    complete: bool
    finish: dict[int, int] = field(default_factory=dict)


def current_class(model: ResourceModel, i: int, rank: dict[int, int]) -> int | None:
    """The class ``i`` is waiting on: its ``≺``-largest outstanding class."""
    pending = model.outstanding(i)
    return max(pending, key=rank.__getitem__) if pending else None


def order_family(model: ResourceModel, rank: dict[int, int]) -> tuple[OrderFamily, dict[int, int | None]]:
    waiting = {i: current_class(model, i, rank) for i in model.processes}

    def key(i):
        r = waiting[i]
        return (-(rank[r] if r is not None else -1), i)

    orders = {}
    for r in model.classes:
        ground = model.requesters(r)
        if ground:
            orders[r] = PartialOrder.chain(sorted(ground, key=key))
    return OrderFamily(orders), waiting


def classical_linear_order_rgm(
    model: ResourceModel,
    class_order: list[int],
    seed: int,
    max_steps: int | None = None,
    release_prob: float = 0.5,
) -> ClassicalRun:
    """Simulate the linear-order mechanism step by step.

    Each step builds the order family, grants every class to its
    ``≺_r``-maximum when that process is waiting on it, and lets each fully
    granted process release with probability ``release_prob`` (a seeded,
    random computation time).
    """
    if sorted(class_order) != model.classes:
        raise ValueError("class_order must list every class exactly once")
    rank = {r: k for k, r in enumerate(class_order)}
    model = model.copy()
    rng = np.random.default_rng(seed)
    if max_steps is None:
        max_steps = 100 * (len(model.processes) + len(model.classes)) + 100
    trace: list[Event] = []
    steps: list[Step] = []
    finish: dict[int, int] = {}
    t = 0
    while model.requests and t < max_steps:
        t += 1
        trace.append(Event(ROUND_START, t))
        fam, waiting = order_family(model, rank)
        snapshot = model.copy()
        grants = []
        for r, order in fam.orders.items():
            (top,) = order.maxima()
            if waiting[top] == r:
                units = model.outstanding(top)[r]
                model.grant(top, r, units)
                grants.append((top, r))
                trace.append(Event(GRANTED, t, process=top, resource=r, units=units))
        model.check()
        steps.append(Step(t, snapshot, fam, waiting, grants))
        for i in model.processes:
            if model.fully_granted(i) and rng.random() < release_prob:
                model.release(i)
                model.retire(i)
                finish[i] = t
                trace.append(Event(RELEASED, t, process=i))
                trace.append(Event(TERMINATED, t, process=i))
    return ClassicalRun(trace, steps, not model.requests, finish)


def verify_steps(steps: list[Step]):
    """Driven-by report for every step; returns ``(ok, reports)``."""
    reports = [check_driven_by(s.model, s.family, s.grants) for s in steps]
    return all(r.ok for r in reports), reports


def random_model(rng: np.random.Generator, n_procs: int, n_classes: int, capacity: int = 1) -> ResourceModel:
    """Each process requests a random nonempty subset of classes."""
    requests = {}
    for i in range(n_procs):
        chosen = [r for r in range(n_classes) if rng.random() < 0.5] or [int(rng.integers(n_classes))]
        requests[i] = {r: int(rng.integers(1, capacity + 1)) for r in chosen}
    return ResourceModel({r: capacity for r in range(n_classes)}, requests)


def verify_classical_trace(model: ResourceModel, class_order: list[int], events: list[Event]):
    """Replay a classical-strategy trace and check every step's grants.

    Returns ``(ok, messages)``; grants are checked against the order family
    rebuilt from the replayed state, so a trace that grants out of priority
    order, or beyond capacity, is rejected.
    """
    rank = {r: k for k, r in enumerate(class_order)}
    model = model.copy()
    problems: list[str] = []
    by_step: dict[int, list[Event]] = {}
    for e in events:
        if e.round is not None:
            by_step.setdefault(e.round, []).append(e)
    for t, evs in sorted(by_step.items()):
        fam, _ = order_family(model, rank)
        grants = [(e.process, e.resource) for e in evs if e.type == GRANTED]
        rep = check_driven_by(model, fam, grants)
        for i, r in rep.condition1_violations:
            problems.append(f"step {t}: process {i} granted class {r} but is not maximal in its order")
        if not rep.condition2_ok:
            problems.append(f"step {t}: capacity condition fails for class {rep.condition2_violation[0]}")
        if not rep.acyclic:
            problems.append(f"step {t}: priority digraph has cycle {rep.cycle}")
        for e in evs:
            try:
                if e.type == GRANTED:
                    model.grant(e.process, e.resource, e.units)
                elif e.type == RELEASED:
                    if not model.fully_granted(e.process):
                        problems.append(f"step {t}: process {e.process} released before being fully granted")
                    model.release(e.process)
                elif e.type == TERMINATED:
                    model.retire(e.process)
            except (KeyError, ValueError, RuntimeError) as exc:
                problems.append(f"step {t}: {exc}")
    if model.requests:
        problems.append(f"processes {model.processes} never finished")
    return not problems, problems
