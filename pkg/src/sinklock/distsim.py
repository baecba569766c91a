"""Message-passing version of the random-orientation mechanism.

Processes only talk to conflict-graph neighbours. Per live edge and round:

* the lower-id endpoint draws the edge's coin from the shared
  ``(seed, round, edge index)`` schedule and sends it (``coin``);
* the higher-id endpoint answers with an ``ack`` once it knows whether it is
  a sink this round, and the ack says whether it is leaving.

A process whose live edges all point inward is a sink: it is granted, computes
for zero time, releases, and sends ``leave`` to its higher-id neighbours (its
lower-id neighbours learn it from the ack). A non-sink learns the fate of a
lower-id out-neighbour from that neighbour's ``leave`` or from its next-round
coin, and starts the next round once every neighbour's fate is known and
every higher-id neighbour has acknowledged. Rounds are thus synchronized per
edge rather than by a global barrier.

The simulator is a sequential virtual-time event queue.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from sinklock.coins import round_coins
from sinklock.graphs import Graph
from sinklock.trace import GRANTED, MESSAGE, ORIENTATION_FIXED, RELEASED, ROUND_START, TERMINATED, Event, arrow

START, COIN, ACK, LEAVE = "start", "coin", "ack", "leave"

NEGOTIATING = "negotiating"
SINK_GRANTED = "sink-granted"
RELEASED_PHASE = "released"
DONE = "done"
STALLED = "stalled"
IDLE = "idle"


class ProtocolViolation(RuntimeError):
    """A process received a message its protocol cannot accept."""


@dataclass(frozen=True)
class DelaySpec:
    """Per-message delay law with finite support.

    ``zero``; ``constant`` (params: value); ``uniform`` (params: low, high);
    ``discrete`` (params: the possible delays, drawn uniformly).
    """

    name: str = "zero"
    params: tuple[float, ...] = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        arity = {"zero": (0, 0), "constant": (1, 1), "uniform": (2, 2), "discrete": (1, 64)}
        if self.name not in arity:
            raise ValueError(f"unknown delay law {self.name!r}")
        lo, hi = arity[self.name]
        if not lo <= len(self.params) <= hi:
            raise ValueError(f"delay law {self.name!r} takes {lo}..{hi} parameters")
        if any(x < 0 for x in self.params):
            raise ValueError("delays must be non-negative")
        if self.name == "uniform" and self.params[0] > self.params[1]:
            raise ValueError("uniform delay needs low <= high")

    def sampler(self) -> Callable[[], float]:
        rng = np.random.default_rng(self.seed)
        if self.name == "zero":
            return lambda: 0.0
        if self.name == "constant":
            return lambda: self.params[0]
        if self.name == "uniform":
            lo, hi = self.params
            return lambda: float(rng.uniform(lo, hi))
        values = self.params
        return lambda: values[int(rng.integers(len(values)))]

    def to_dict(self) -> dict:
        return {"name": self.name, "params": list(self.params), "seed": self.seed}


@dataclass(frozen=True)
class Msg:
    kind: str
    src: int
    dst: int
    round: int
    edge: tuple[int, int] | None = None
    bit: int | None = None
    left: bool | None = None
    send_time: float = 0.0


@dataclass(frozen=True)
class Context:
    seed: int
    m: int
    edge_index: dict
    max_rounds: int


@dataclass(frozen=True)
class ProcessState:
    pid: int
    ctx: Context
    live: frozenset[int]
    round: int = 0
    phase: str = IDLE
    slots: dict = field(default_factory=dict)  # neighbour -> "in" | "out"
    stays: dict = field(default_factory=dict)  # neighbour -> survives this round?
    acked: frozenset[int] = frozenset()
    sink: bool | None = None
    buffer: tuple[Msg, ...] = ()

    @property
    def lower(self) -> list[int]:
        return sorted(w for w in self.live if w < self.pid)

    @property
    def higher(self) -> list[int]:
        return sorted(w for w in self.live if w > self.pid)


def _edge(a: int, b: int) -> tuple[int, int]:
    return (min(a, b), max(a, b))


class _Step:
    """Mutable scratch for one transition; the input state is never touched."""

    def __init__(self, p: ProcessState):
        self.p = p
        self.slots = dict(p.slots)
        self.stays = dict(p.stays)
        self.acked = set(p.acked)
        self.buffer = list(p.buffer)
        self.out: list[Msg] = []
        self.events: list[Event] = []

    def commit(self, **changes) -> None:
        self.p = replace(
            self.p,
            slots=dict(self.slots),
            stays=dict(self.stays),
            acked=frozenset(self.acked),
            buffer=tuple(self.buffer),
            **changes,
        )

    def send(self, kind, dst, **kw) -> None:
        p = self.p
        self.out.append(Msg(kind, p.pid, dst, p.round, edge=_edge(p.pid, dst), **kw))

    def begin_round(self, k: int) -> None:
        p = self.p
        if k > p.ctx.max_rounds:
            self.commit(phase=STALLED)
            return
        self.slots, self.stays, self.acked = {}, {}, set()
        self.commit(round=k, phase=NEGOTIATING, sink=None)
        self.events.append(Event(ROUND_START, k, process=p.pid))
        coins = round_coins(p.ctx.seed, k, p.ctx.m)
        for w in self.p.higher:
            e = (p.pid, w)
            bit = coins[p.ctx.edge_index[e]]
            if bit == 0:
                self.slots[w] = "out"
            else:
                self.slots[w] = "in"
                self.stays[w] = True
            head, tail = (w, p.pid) if bit == 0 else (p.pid, w)
            self.events.append(Event(ORIENTATION_FIXED, k, edge=e, direction=arrow(tail, head)))
            self.send(COIN, w, bit=bit)
        self.commit()

    def handle(self, msg: Msg) -> bool:
        """Apply one current-round message; False if it must wait in the buffer."""
        p = self.p
        u = msg.src
        if msg.kind == COIN:
            if u not in p.live or u > p.pid or u in self.slots:
                raise ProtocolViolation(f"process {p.pid}: unexpected coin {msg}")
            if msg.bit == 0:
                self.slots[u] = "in"
                self.stays[u] = True
            else:
                self.slots[u] = "out"
        elif msg.kind == ACK:
            if u not in p.live or u < p.pid or u in self.acked:
                raise ProtocolViolation(f"process {p.pid}: unexpected ack {msg}")
            if msg.left and self.slots.get(u) != "out":
                raise ProtocolViolation(f"process {p.pid}: neighbour {u} left without being a sink")
            self.acked.add(u)
            self.stays[u] = not msg.left
        elif msg.kind == LEAVE:
            if u not in p.live or u > p.pid:
                raise ProtocolViolation(f"process {p.pid}: unexpected leave {msg}")
            if u not in self.slots:
                return False
            if self.slots[u] != "out":
                raise ProtocolViolation(f"process {p.pid}: neighbour {u} left without being a sink")
            self.stays[u] = False
        else:
            raise ProtocolViolation(f"process {p.pid}: unknown message kind {msg.kind!r}")
        self.commit()
        return True

    def progress(self) -> None:
        while True:
            p = self.p
            if p.phase == NEGOTIATING and p.sink is None and len(self.slots) == len(p.live):
                sink = all(s == "in" for s in self.slots.values())
                if sink:
                    self.events.append(Event(GRANTED, p.round, process=p.pid))
                    self.commit(sink=True, phase=SINK_GRANTED)
                    self.events.append(Event(RELEASED, p.round, process=p.pid))
                    for w in p.lower:
                        self.send(ACK, w, left=True)
                    for w in p.higher:
                        self.send(LEAVE, w)
                    self.commit(phase=RELEASED_PHASE)
                else:
                    for w in p.lower:
                        self.send(ACK, w, left=False)
                    self.commit(sink=False)
                continue
            if p.phase == RELEASED_PHASE and self.acked >= set(p.higher):
                self.events.append(Event(TERMINATED, p.round, process=p.pid))
                self.commit(phase=DONE)
                return
            if (
                p.phase == NEGOTIATING
                and p.sink is False
                and len(self.stays) == len(p.live)
                and self.acked >= set(p.higher)
            ):
                survivors = frozenset(w for w in p.live if self.stays[w])
                self.p = replace(p, live=survivors)
                self.begin_round(p.round + 1)
                continue
            if self.drain():
                continue
            return

    def drain(self) -> bool:
        """Handle buffered messages of the current round; True if any was used."""
        used = False
        for msg in list(self.buffer):
            if msg.round == self.p.round and self.p.phase == NEGOTIATING:
                if self.handle(msg):
                    self.buffer.remove(msg)
                    self.commit()
                    used = True
        return used


def protocol_step(p: ProcessState, msg: Msg) -> tuple[ProcessState, list[Msg], list[Event]]:
    """Pure transition of one process on one delivered message."""
    if msg.dst != p.pid:
        raise ProtocolViolation(f"message for {msg.dst} delivered to {p.pid}")
    s = _Step(p)
    if msg.kind == START:
        if p.phase != IDLE:
            raise ProtocolViolation(f"process {p.pid} started twice")
        s.begin_round(1)
    elif p.phase in (RELEASED_PHASE, DONE):
        # a departed process still consumes acks for its final round
        if msg.kind != ACK or msg.round != p.round or msg.src in s.acked or msg.src not in p.higher:
            raise ProtocolViolation(f"process {p.pid} has left but received {msg}")
        s.acked.add(msg.src)
        s.commit()
    elif p.phase == STALLED:
        s.buffer.append(msg)
        s.commit()
        return s.p, s.out, s.events
    elif msg.round > p.round:
        if msg.round != p.round + 1 or msg.src not in p.live:
            raise ProtocolViolation(f"process {p.pid} in round {p.round} received {msg}")
        # any next-round message proves the sender survived this round
        s.stays[msg.src] = True
        s.buffer.append(msg)
        s.commit()
    elif msg.round < p.round:
        raise ProtocolViolation(f"process {p.pid} in round {p.round} received stale {msg}")
    elif not s.handle(msg):
        s.buffer.append(msg)
        s.commit()
    s.progress()
    return s.p, s.out, s.events


@dataclass
class DistResult:
    trace: list[Event]
    complete: bool
    rounds: int
    messages: int
    messages_per_round: dict[int, int]
    sink_sets: list[frozenset[int]]
    sim_time: float
    states: dict[int, ProcessState]


def dist_simulate(
    g: Graph,
    seed: int,
    delay: DelaySpec | None = None,
    max_rounds: int | None = None,
) -> DistResult:
    """Run the protocol on every vertex of ``g`` until the event queue drains."""
    delay = delay or DelaySpec()
    if max_rounds is None:
        max_rounds = 10 * g.n
    ctx = Context(seed, g.m, g.edge_index, max_rounds)
    draw = delay.sampler()
    states = {v: ProcessState(v, ctx, g.adjacency[v]) for v in range(g.n)}
    queue: list[tuple[float, int, Msg]] = []
    seq = 0
    for v in range(g.n):
        heapq.heappush(queue, (0.0, seq, Msg(START, v, v, 0)))
        seq += 1
    trace: list[Event] = []
    per_round: dict[int, int] = {}
    sinks: dict[int, set[int]] = {}
    now = 0.0
    while queue:
        now, _, msg = heapq.heappop(queue)
        if msg.kind != START:
            trace.append(
                Event(MESSAGE, msg.round, process=msg.dst, edge=msg.edge, kind=msg.kind,
                      send_time=msg.send_time, deliver_time=now)
            )
        state, out, events = protocol_step(states[msg.dst], msg)
        states[msg.dst] = state
        for e in events:
            trace.append(replace(e, time=now))
            if e.type == GRANTED:
                sinks.setdefault(e.round, set()).add(e.process)
        for o in out:
            o = replace(o, send_time=now)
            per_round[o.round] = per_round.get(o.round, 0) + 1
            heapq.heappush(queue, (now + draw(), seq, o))
            seq += 1
    rounds = max(sinks, default=0)
    complete = all(s.phase == DONE for s in states.values())
    sink_sets = [frozenset(sinks.get(k, ())) for k in range(1, rounds + 1)]
    return DistResult(trace, complete, rounds, sum(per_round.values()), per_round, sink_sets, now, states)


def expected_message_counts(g: Graph, sink_sets: list[frozenset[int]]) -> dict[int, int]:
    """Per-round count the protocol must produce: coin + ack per live edge,
    plus one leave from every sink to each higher-id live neighbour."""
    alive = set(range(g.n))
    counts = {}
    for k, sinks in enumerate(sink_sets, 1):
        live = [(u, v) for u, v in g.edges if u in alive and v in alive]
        leaves = sum(1 for s in sinks for w in g.adjacency[s] if w in alive and w > s)
        if live or leaves:
            counts[k] = 2 * len(live) + leaves
        alive -= sinks
    return counts
