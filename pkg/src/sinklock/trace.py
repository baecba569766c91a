"""Trace events and their JSON-lines encoding."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

# serialization order; absent fields are omitted
FIELDS = ("type", "round", "process", "edge", "direction", "resource", "units", "kind", "send_time", "deliver_time", "time")

ROUND_START = "round_start"
ORIENTATION_FIXED = "orientation_fixed"
GRANTED = "granted"
RELEASED = "released"
TERMINATED = "terminated"
MESSAGE = "message"


@dataclass(frozen=True)
class Event:
    type: str
    round: int | None = None
    process: int | None = None
    edge: tuple[int, int] | None = None
    direction: str | None = None
    resource: int | None = None
    units: int | None = None
    kind: str | None = None
    send_time: float | None = None
    deliver_time: float | None = None
    time: float | None = None

    def to_dict(self) -> dict:
        out = {}
        for name in FIELDS:
            value = getattr(self, name)
            if value is not None:
                out[name] = list(value) if name == "edge" else value
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Event":
        unknown = set(d) - set(FIELDS)
        if unknown:
            raise ValueError(f"unknown trace fields {sorted(unknown)}")
        kw = dict(d)
        if "edge" in kw:
            kw["edge"] = tuple(kw["edge"])
        return cls(**kw)


def arrow(tail: int, head: int) -> str:
    return f"{tail}>{head}"


def parse_arrow(text: str) -> tuple[int, int]:
    t, h = text.split(">")
    return int(t), int(h)


def dumps(events: Iterable[Event], header: dict | None = None) -> str:
    lines = []
    if header is not None:
        lines.append(json.dumps({"type": "run_config", **header}, sort_keys=False))
    lines.extend(json.dumps(e.to_dict()) for e in events)
    return "\n".join(lines) + "\n"


def loads(text: str) -> tuple[dict | None, list[Event]]:
    header = None
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        d = json.loads(line)
        if d.get("type") == "run_config":
            if header is not None or events:
                raise ValueError(f"line {lineno}: run_config must be the first record")
            header = {k: v for k, v in d.items() if k != "type"}
        else:
            events.append(Event.from_dict(d))
    return header, events
