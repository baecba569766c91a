"""Conflict graphs and generators for the graph classes under study.

Vertices are process ids ``0..n-1``; every edge stands for a resource class
shared by its two endpoints. Note that throughout this package ``omega(G)``
means the *independence number* of ``G`` (the size of its largest independent
set), not the clique number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

CLASSES = (
    "path",
    "star",
    "tree",
    "cycle",
    "complete",
    "bounded_degree",
    "gnp",
    "power_law",
)


class GraphError(ValueError):
    """Invalid graph data or generator parameters."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    ``edges`` is normalized to a sorted tuple of ``(u, v)`` pairs with
    ``u < v``; the position of an edge in that tuple is its *edge index*,
    which keys the coin schedule and the resource class of the edge.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise GraphError(f"vertex count must be >= 0, got {self.n}")
        normalized = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={self.n}")
            normalized.append((min(u, v), max(u, v)))
        normalized.sort()
        for a, b in zip(normalized, normalized[1:]):
            if a == b:
                raise GraphError(f"duplicate edge {a}")
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    def neighbors(self, v: int) -> frozenset[int]:
        self._check_vertex(v)
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return len(self.adjacency[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    @property
    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edge_index

    def is_independent(self, vertices: Iterable[int]) -> bool:
        vs = set(vertices)
        return not any(u in vs and v in vs for u, v in self.edges)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            for w in self.adjacency[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range for n={self.n}")

    # edge-list text format: "n m" header, then one "u v" line per edge
    def to_edgelist(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> "Graph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 2:
            raise GraphError("edge list must start with an 'n m' header")
        try:
            n, m = int(rows[0][0]), int(rows[0][1])
            edges = []
            for row in rows[1:]:
                if len(row) != 2:
                    raise GraphError(f"malformed edge line: {' '.join(row)!r}")
                edges.append((int(row[0]), int(row[1])))
        except ValueError as exc:
            raise GraphError(f"non-integer token in edge list: {exc}") from None
        if len(edges) != m:
            raise GraphError(f"header announces {m} edges, found {len(edges)}")
        return cls(n, tuple(edges))


def degree(g: Graph, v: int) -> int:
    return g.degree(v)


@dataclass(frozen=True)
class GraphClassSpec:
    """A graph class plus the parameters needed to build one instance.

    ``k`` is used by ``bounded_degree``, ``p`` by ``gnp`` and ``a`` by
    ``power_law``; ``seed`` only matters for randomized classes.
    """

    cls: str
    n: int
    k: int | None = None
    p: float | None = None
    a: float | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        validate(self)

    def params(self) -> str:
        """Class parameters as a compact ``key=value`` string."""
        parts = []
        for name in ("k", "p", "a"):
            value = getattr(self, name)
            if value is not None:
                parts.append(f"{name}={value:g}")
        return ";".join(parts)


def validate(spec: GraphClassSpec) -> None:
    if spec.cls not in CLASSES:
        raise GraphError(f"unknown graph class {spec.cls!r}; expected one of {CLASSES}")
    if spec.n < 1:
        raise GraphError(f"{spec.cls}: n must be >= 1, got n={spec.n}")
    if spec.cls == "cycle" and spec.n < 3:
        raise GraphError(f"cycle: n must be >= 3, got n={spec.n}")
    if spec.cls == "bounded_degree":
        if spec.k is None or spec.k < 1:
            raise GraphError(f"bounded_degree: k must be >= 1, got k={spec.k}")
    if spec.cls == "gnp":
        if spec.p is None or not 0.0 <= spec.p <= 1.0:
            raise GraphError(f"gnp: p must lie in [0, 1], got p={spec.p}")
    if spec.cls == "power_law":
        if spec.a is None or spec.a < 2:
            raise GraphError(f"power_law: a must be >= 2, got a={spec.a}")
    if not 0 <= spec.seed < 2**64:
        raise GraphError(f"seed must be a 64-bit unsigned value, got {spec.seed}")


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def star_graph(n: int) -> Graph:
    """Star on ``n`` vertices with center 0."""
    return Graph(n, tuple((0, i) for i in range(1, n)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError(f"cycle: n must be >= 3, got n={n}")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)))


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    """Uniform labeled tree, decoded from a random Pruefer sequence."""
    if n <= 2:
        return path_graph(n)
    seq = [int(x) for x in rng.integers(0, n, size=n - 2)]
    remaining = [0] * n
    for x in seq:
        remaining[x] += 1
    edges = []
    # O(n^2) decoding is fine at the sizes this package targets
    for x in seq:
        leaf = next(v for v in range(n) if remaining[v] == 0)
        edges.append((leaf, x))
        remaining[leaf] = -1
        remaining[x] -= 1
    u, v = (v for v in range(n) if remaining[v] == 0)
    edges.append((u, v))
    return Graph(n, tuple(edges))


def gnp_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    iu, iv = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph(n, tuple(zip(iu[keep].tolist(), iv[keep].tolist())))


def bounded_degree_graph(
    n: int,
    k: int,
    rng: np.random.Generator,
    target_edges: int | None = None,
    budget: int | None = None,
) -> Graph:
    """Random graph with maximum degree at most ``k``.

    Uniform random pairs are proposed and accepted while both endpoints have
    spare degree; generation stops at ``target_edges`` accepted edges or after
    ``budget`` proposals.
    """
    if target_edges is None:
        target_edges = n * k // 2
    if budget is None:
        budget = 50 * n * k
    deg = [0] * n
    chosen: set[tuple[int, int]] = set()
    if n < 2:
        return Graph(n)
    proposals = 0
    while len(chosen) < target_edges and proposals < budget:
        batch = rng.integers(0, n, size=(256, 2))
        for u, v in batch.tolist():
            proposals += 1
            if u != v and deg[u] < k and deg[v] < k:
                e = (min(u, v), max(u, v))
                if e not in chosen:
                    chosen.add(e)
                    deg[u] += 1
                    deg[v] += 1
                    if len(chosen) >= target_edges:
                        break
            if proposals >= budget:
                break
    return Graph(n, tuple(chosen))


def power_law_degree_sequence(n: int, a: float, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. degrees from ``d**-a / delta(a)`` on ``1..n-1``, sum made even."""
    support = np.arange(1, n, dtype=np.int64)
    weights = support.astype(float) ** (-a)
    degrees = rng.choice(support, size=n, p=weights / weights.sum())
    if degrees.sum() % 2:
        degrees[rng.integers(n)] += 1
    return degrees


def configuration_graph(degrees: np.ndarray, rng: np.random.Generator) -> Graph:
    """Erased configuration model: pair stubs, drop self-loops and multi-edges."""
    n = len(degrees)
    stubs = np.repeat(np.arange(n), degrees)
    rng.shuffle(stubs)
    pairs = stubs[: len(stubs) - len(stubs) % 2].reshape(-1, 2)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pairs.sort(axis=1)
    unique = np.unique(pairs, axis=0) if len(pairs) else pairs
    return Graph(n, tuple(map(tuple, unique.tolist())))


def power_law_graph(n: int, a: float, rng: np.random.Generator) -> Graph:
    if n < 2:
        return Graph(n)
    return configuration_graph(power_law_degree_sequence(n, a, rng), rng)


def generate(spec: GraphClassSpec) -> Graph:
    """Build the graph described by ``spec``; a pure function of ``spec``."""
    validate(spec)
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    if spec.cls == "path":
        return path_graph(n)
    if spec.cls == "star":
        return star_graph(n)
    if spec.cls == "cycle":
        return cycle_graph(n)
    if spec.cls == "complete":
        return complete_graph(n)
    if spec.cls == "tree":
        return random_tree(n, rng)
    if spec.cls == "gnp":
        return gnp_graph(n, spec.p, rng)
    if spec.cls == "bounded_degree":
        return bounded_degree_graph(n, spec.k, rng, **spec.extra)
    return power_law_graph(n, spec.a, rng)
