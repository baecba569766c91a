"""Random-orientation deadlock prevention: graphs, orientations, analytics,
simulators and a priority-digraph verifier."""

from sinklock.graphs import Graph, GraphClassSpec, degree, generate
from sinklock.orientation import (
    ExactStats,
    Orientation,
    enumerate_exact,
    is_acyclic,
    maximal_independent_sets,
    random_orientation,
    sinks,
)

__version__ = "0.1.0"

__all__ = [
    "ExactStats",
    "Graph",
    "GraphClassSpec",
    "Orientation",
    "degree",
    "enumerate_exact",
    "generate",
    "is_acyclic",
    "maximal_independent_sets",
    "random_orientation",
    "sinks",
]
