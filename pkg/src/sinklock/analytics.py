"""Closed forms for the sink count X of a uniform random orientation,
Monte Carlo estimators, and the expected-round recursion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from sinklock.graphs import Graph, GraphClassSpec
from sinklock.orientation import sink_counts

EXACT = "exact"
LOWER_BOUND = "lower_bound"
APPROXIMATION = "approximation"
LIMIT = "limit"

ZETA_TOL = 1e-12


class UnsupportedForm(ValueError):
    """No closed form is known for this class/quantity pair."""


class Divergence(ArithmeticError):
    """The expected-round recursion stalled below its decrement floor."""


@dataclass(frozen=True)
class ClosedForm:
    cls: str
    kind: str  # "expected_sinks" | "prob_positive"
    form: str
    value: Fraction | float
    params: str = ""

    def __float__(self) -> float:
        return float(self.value)


def mean_degree(n: int, p: float) -> float:
    """Mean degree ``z = (n - 1) p`` of G(n, p)."""
    return (n - 1) * p


def _zeta_tail(a: float, N: int) -> float:
    # Euler-Maclaurin remainder of sum_{k>N} k^-a
    return (
        N ** (1 - a) / (a - 1)
        - N ** (-a) / 2
        + a * N ** (-a - 1) / 12
        - a * (a + 1) * (a + 2) * N ** (-a - 3) / 720
    )


def delta(a: float, n: int | None = None) -> float:
    """Truncated zeta sum ``sum_{k=1}^{n-1} k**-a``; ``n=None`` gives zeta(a).

    The limit is a partial sum plus an Euler-Maclaurin tail, accurate well
    below ``ZETA_TOL`` for ``a >= 2``.
    """
    if a < 2:
        raise ValueError(f"delta: a must be >= 2, got {a}")
    if n is None:
        N = 1000
        head = math.fsum(k ** (-a) for k in range(1, N + 1))
        return head + _zeta_tail(a, N)
    if n < 2:
        raise ValueError(f"delta: n must be >= 2, got {n}")
    return math.fsum(k ** (-a) for k in range(1, n))


def _spec(spec_or_cls, n=None, **params) -> GraphClassSpec:
    if isinstance(spec_or_cls, GraphClassSpec):
        return spec_or_cls
    return GraphClassSpec(spec_or_cls, n, **params)


def expected_sinks_closed_form(spec, n: int | None = None, *, table_variant: bool = False, **params) -> ClosedForm:
    """E[X] for a graph class, as an exact value, bound or approximation.

    ``table_variant`` selects the weaker ``ceil(n/(k+1)) / 2**k`` bounded-degree
    bound instead of the stronger ``n / 2**k``.
    """
    s = _spec(spec, n, **params)
    n = s.n
    c = s.cls
    if c == "star":
        v = Fraction(n - 1, 2) + Fraction(1, 2 ** (n - 1))
    elif c == "path":
        v = Fraction(n + 2, 4) if n >= 2 else Fraction(1)
    elif c == "cycle":
        v = Fraction(n, 4)
    elif c == "complete":
        v = Fraction(n, 2 ** (n - 1))
    elif c == "bounded_degree":
        if table_variant:
            v = Fraction(-(-n // (s.k + 1)), 2**s.k)
        else:
            v = Fraction(n, 2**s.k)
        return ClosedForm(c, "expected_sinks", LOWER_BOUND, v, s.params())
    elif c == "gnp":
        z = mean_degree(n, s.p)
        return ClosedForm(c, "expected_sinks", APPROXIMATION, n / math.exp(z / 2), s.params())
    elif c == "power_law":
        if n < 2:
            raise UnsupportedForm("power_law: the bound needs n >= 2")
        return ClosedForm(c, "expected_sinks", LOWER_BOUND, n / (2 * delta(s.a, n)), s.params())
    else:
        raise UnsupportedForm(f"no expected-sinks closed form for class {c!r}")
    return ClosedForm(c, "expected_sinks", EXACT, v, s.params())


def prob_positive_closed_form(spec, n: int | None = None, **params) -> ClosedForm:
    """Pr[X > 0] for a graph class."""
    s = _spec(spec, n, **params)
    n = s.n
    c = s.cls
    if c in ("tree", "path", "star"):
        v = Fraction(1)
    elif c == "cycle":
        v = 1 - Fraction(1, 2 ** (n - 1))
    elif c == "complete":
        v = Fraction(n, 2 ** (n - 1))
    elif c == "bounded_degree":
        k = s.k
        v = 1 - (1 - Fraction(1, 2**k)) ** (-(-n // (k + 1)))
        return ClosedForm(c, "prob_positive", LOWER_BOUND, v, s.params())
    elif c == "power_law":
        if n < 2:
            raise UnsupportedForm("power_law: the bound needs n >= 2")
        d = delta(s.a, n)
        v = 1 - (1 - (2 - math.sqrt(2)) / (2 * d)) ** n
        return ClosedForm(c, "prob_positive", LOWER_BOUND, v, s.params())
    elif c == "gnp":
        # only a Markov upper bound min(1, n e^{-z/2}); it tends to 0 for fixed p
        z = mean_degree(n, s.p)
        return ClosedForm(c, "prob_positive", LIMIT, min(1.0, n / math.exp(z / 2)), s.params())
    else:
        raise UnsupportedForm(f"no Pr[X > 0] closed form for class {c!r}")
    return ClosedForm(c, "prob_positive", EXACT, v, s.params())


def degree_sum_expected(g: Graph) -> Fraction:
    """Exact E[X] for any graph: each vertex is a sink with prob 2**-deg."""
    return sum((Fraction(1, 2**d) for d in g.degrees()), Fraction(0))


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    se: float
    trials: int
    seed: int
    target: float | None = None
    form: str | None = None
    verdict: str | None = None


def judge(report: EstimateReport, target, form: str, z: float = 4.0) -> EstimateReport:
    """Attach a verdict comparing an estimate with a closed-form target."""
    t = float(target)
    if form == LOWER_BOUND:
        ok = report.estimate >= t - z * report.se
        verdict = "bound-satisfied" if ok else "fail"
    else:
        ok = abs(report.estimate - t) <= z * report.se
        verdict = "within-tolerance" if ok else "fail"
    return EstimateReport(report.estimate, report.se, report.trials, report.seed, t, form, verdict)


def sample_sink_counts(g: Graph, trials: int, seed: int, batch: int = 1 << 14) -> np.ndarray:
    """Sink counts of ``trials`` i.i.d. fair orientations, deterministic in ``seed``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    edges = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
    out = np.empty(trials, dtype=np.int64)
    for start in range(0, trials, batch):
        rows = min(batch, trials - start)
        bits = rng.integers(0, 2, size=(rows, g.m), dtype=np.int8)
        tails = np.where(bits == 0, edges[:, 0], edges[:, 1])
        out[start:start + rows] = sink_counts(g, tails)
    return out


def _report(samples: np.ndarray, trials: int, seed: int) -> EstimateReport:
    mean = float(samples.mean())
    sd = float(samples.std(ddof=1)) if trials > 1 else 0.0
    return EstimateReport(mean, sd / math.sqrt(trials), trials, seed)


def monte_carlo(g: Graph, trials: int, seed: int) -> tuple[EstimateReport, EstimateReport]:
    """Estimates of (E[X], Pr[X > 0]) with standard errors."""
    counts = sample_sink_counts(g, trials, seed)
    return _report(counts, trials, seed), _report((counts > 0).astype(float), trials, seed)


def _expectation_fn(spec: GraphClassSpec) -> Callable[[float], float]:
    c = spec.cls
    if c == "path":
        return lambda x: (x + 2) / 4
    if c == "star":
        return lambda x: (x - 1) / 2 + 2.0 ** (1 - x)
    if c == "cycle":
        return lambda x: x / 4
    if c == "complete":
        return lambda x: x / 2.0 ** (x - 1)
    if c == "bounded_degree":
        return lambda x: x / 2.0**spec.k
    if c == "gnp":
        return lambda x: x / math.exp(mean_degree(x, spec.p) / 2)
    if c == "power_law":
        return lambda x: x / (2 * delta(spec.a, max(2, math.ceil(x))))
    raise UnsupportedForm(f"no expectation model for class {c!r}")


def expected_rounds(
    spec_or_fn: GraphClassSpec | Callable[[float], float],
    n: float | None = None,
    floor: float = 1e-9,
    max_steps: int = 10_000_000,
) -> float:
    """Solve ``T(x) = 1 + T(x - E[X_x])`` with ``T(x) = 0`` for ``x <= 0``.

    ``x`` is real-valued: iterate ``x <- x - E[X_x]`` counting steps, and when
    a step would overshoot zero count only the fraction ``x / E[X_x]``. The
    final step is taken once ``x <= 1``: at most one process remains and a
    lone process is always a sink. Without this rule classes with ``E[X_x]``
    proportional to ``x`` (cycles, bounded degree) would never reach zero.
    """
    if isinstance(spec_or_fn, GraphClassSpec):
        fn = _expectation_fn(spec_or_fn)
        x = float(spec_or_fn.n if n is None else n)
    else:
        fn = spec_or_fn
        x = float(n)
    rounds = 0.0
    steps = 0
    while x > 0:
        dec = fn(x) if x > 1 else max(fn(x), x)
        if dec < floor:
            raise Divergence(f"decrement {dec:.3g} fell below floor {floor:g} at x={x:.6g}")
        if dec >= x:
            return rounds + x / dec
        x -= dec
        rounds += 1
        steps += 1
        if steps >= max_steps:
            raise Divergence(f"no convergence after {max_steps} steps")
    return rounds
