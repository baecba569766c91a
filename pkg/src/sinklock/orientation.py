"""Orientations of a conflict graph, their sinks, and exact enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from sinklock.coins import round_coins
from sinklock.graphs import Graph, GraphError

ENUMERATION_CAP = 20
MIS_CAP = 20


class CapExceeded(ValueError):
    """An exhaustive oracle was asked to run past its size cap."""


@dataclass(frozen=True)
class Orientation:
    """One direction per base edge; ``arcs[i]`` orients ``base.edges[i]``."""

    base: Graph
    arcs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.arcs) != self.base.m:
            raise GraphError(f"{len(self.arcs)} arcs for {self.base.m} edges")
        for (u, v), (t, h) in zip(self.base.edges, self.arcs):
            if {t, h} != {u, v}:
                raise GraphError(f"arc {t}->{h} does not orient edge ({u}, {v})")

    @classmethod
    def from_bits(cls, g: Graph, bits: Iterable[int]) -> "Orientation":
        arcs = tuple((u, v) if not b else (v, u) for (u, v), b in zip(g.edges, bits))
        return cls(g, arcs)

    def bits(self) -> tuple[int, ...]:
        return tuple(int(t > h) for t, h in self.arcs)

    def out_degrees(self) -> list[int]:
        out = [0] * self.base.n
        for t, _ in self.arcs:
            out[t] += 1
        return out

    def serialize(self) -> str:
        return self.base.to_edgelist() + "".join(f"{t}>{h}\n" for t, h in self.arcs)

    @classmethod
    def parse(cls, text: str) -> "Orientation":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        m = int(lines[0].split()[1])
        g = Graph.from_edgelist("\n".join(lines[: m + 1]))
        arcs = []
        for ln in lines[m + 1:]:
            t, h = ln.split(">")
            arcs.append((int(t), int(h)))
        by_edge = {(min(a), max(a)): a for a in arcs}
        if len(by_edge) != len(arcs) or set(by_edge) != set(g.edges):
            raise GraphError("orientation lines must orient every edge exactly once")
        return cls(g, tuple(by_edge[e] for e in g.edges))


def random_orientation(g: Graph, seed: int, round: int = 0) -> Orientation:
    """Orient every edge by a fair coin from the ``(seed, round)`` schedule."""
    return Orientation.from_bits(g, round_coins(seed, round, g.m))


def sinks(o: Orientation, within: Iterable[int] | None = None) -> frozenset[int]:
    """Vertices with no out-arc.

    With ``within``, only arcs between vertices of that set count and only
    its members are candidates: the sinks of the orientation induced on it.
    """
    if within is None:
        has_out = {t for t, _ in o.arcs}
        return frozenset(v for v in range(o.base.n) if v not in has_out)
    alive = set(within)
    has_out = {t for t, h in o.arcs if t in alive and h in alive}
    return frozenset(alive - has_out)


def find_cycle(n_or_vertices, arcs: Iterable[tuple[int, int]]) -> list[int] | None:
    """A directed cycle as a vertex list, or None when the arcs are acyclic."""
    succ: dict[int, list[int]] = {}
    for t, h in arcs:
        succ.setdefault(t, []).append(h)
        succ.setdefault(h, [])
    vertices = range(n_or_vertices) if isinstance(n_or_vertices, int) else n_or_vertices
    color: dict[int, int] = {}
    for root in list(vertices) + list(succ):
        if color.get(root):
            continue
        # iterative DFS; color 1 = on stack, 2 = finished
        stack = [(root, iter(succ.get(root, ())))]
        color[root] = 1
        path = [root]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
            elif color.get(nxt, 0) == 1:
                return path[path.index(nxt):]
            elif not color.get(nxt):
                color[nxt] = 1
                stack.append((nxt, iter(succ.get(nxt, ()))))
                path.append(nxt)
    return None


def is_acyclic(o: Orientation) -> bool:
    return find_cycle(o.base.n, o.arcs) is None


@dataclass(frozen=True)
class ExactStats:
    expected_sinks: Fraction
    prob_positive: Fraction
    orientation_count: int


def _tail_matrix(g: Graph, codes: np.ndarray) -> np.ndarray:
    """Tails of every edge for each orientation code (bit i = coin of edge i)."""
    edges = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
    bits = (codes[:, None] >> np.arange(g.m, dtype=np.int64)) & 1
    return np.where(bits == 0, edges[:, 0], edges[:, 1])


def sink_counts(g: Graph, tails: np.ndarray) -> np.ndarray:
    """Number of sinks per row of a ``(rows, m)`` tail matrix."""
    rows = tails.shape[0]
    has_out = np.zeros((rows, g.n), dtype=bool)
    if g.m:
        has_out[np.arange(rows)[:, None], tails] = True
    return g.n - has_out.sum(axis=1)


def enumerate_exact(g: Graph, cap: int = ENUMERATION_CAP, chunk: int = 1 << 15) -> ExactStats:
    """Exact E[X] and Pr[X > 0] over all ``2**m`` orientations."""
    if g.m > cap:
        raise CapExceeded(f"enumeration needs 2^{g.m} orientations; cap is m <= {cap}")
    total = 1 << g.m
    sink_sum = 0
    positive = 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        counts = sink_counts(g, _tail_matrix(g, codes))
        sink_sum += int(counts.sum())
        positive += int((counts > 0).sum())
    return ExactStats(Fraction(sink_sum, total), Fraction(positive, total), total)


def orient_toward(g: Graph, targets: Iterable[int]) -> Orientation:
    """Orient every edge touching ``targets`` into it; others low -> high."""
    ts = set(targets)
    return Orientation(g, tuple((v, u) if u in ts else (u, v) for u, v in g.edges))


def maximal_independent_sets(g: Graph, cap: int = MIS_CAP) -> list[frozenset[int]]:
    """All maximal independent sets, each checked to be a realizable sink set."""
    if g.n > cap:
        raise CapExceeded(f"maximal independent set enumeration capped at n <= {cap}, got n={g.n}")
    nbr = [sum(1 << w for w in g.adjacency[v]) for v in range(g.n)]
    found: list[frozenset[int]] = []

    # Bron-Kerbosch with pivoting on the complement graph
    def expand(r: int, p: int, x: int) -> None:
        if not p and not x:
            found.append(frozenset(v for v in range(g.n) if r >> v & 1))
            return
        pivot = (p | x).bit_length() - 1
        # in the complement, pivot's neighbours are its non-neighbours in g
        candidates = p & ~(~nbr[pivot] & ~(1 << pivot))
        v = 0
        while candidates:
            if candidates & 1:
                bit = 1 << v
                keep = ~nbr[v] & ~bit
                expand(r | bit, p & keep, x & keep)
                p &= ~bit
                x |= bit
            candidates >>= 1
            v += 1

    expand(0, (1 << g.n) - 1, 0)
    found.sort(key=lambda s: (len(s), sorted(s)))
    for s in found:
        if not s <= sinks(orient_toward(g, s)):
            raise AssertionError(f"maximal independent set {sorted(s)} is not a sink set")
    return found
