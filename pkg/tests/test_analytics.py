import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import zeta

from sinklock import analytics as an
from sinklock.graphs import GraphClassSpec, generate
from sinklock.orientation import enumerate_exact


def _rounds_exact(fn, x):
    # same recursion in rational arithmetic, written out independently
    rounds = Fraction(0)
    x = Fraction(x)
    while True:
        dec = fn(x) if x > 1 else max(fn(x), x)
        if dec >= x:
            return rounds + x / dec
        x -= dec
        rounds += 1


def test_path_rounds_frozen():
    want = _rounds_exact(lambda x: (x + 2) / 4, 8)
    assert want == Fraction(6839, 1215)
    assert an.expected_rounds(GraphClassSpec("path", 8)) == pytest.approx(float(want), abs=1e-12)


@pytest.mark.parametrize(
    "cls,n,value",
    [("cycle", 16, 11.0), ("complete", 1, 1.0), ("complete", 5, 7.912354110588943), ("path", 16, 7.670426256160138)],
)
def test_rounds_regression(cls, n, value):
    assert an.expected_rounds(GraphClassSpec(cls, n)) == pytest.approx(value, abs=1e-9)


def test_rounds_cycle_matches_rational():
    want = _rounds_exact(lambda x: x / 4, 16)
    assert an.expected_rounds(GraphClassSpec("cycle", 16)) == float(want)


def test_rounds_divergence_reported():
    with pytest.raises(an.Divergence):
        an.expected_rounds(GraphClassSpec("complete", 60))


def test_rounds_custom_function():
    assert an.expected_rounds(lambda x: 1.0, 3.5) == pytest.approx(3.5)


@pytest.mark.parametrize("a", [2.0, 2.5, 3.0])
def test_delta_limit_against_scipy(a):
    assert an.delta(a) == pytest.approx(float(zeta(a)), abs=1e-12)


def test_delta_truncated():
    assert an.delta(2, 4) == pytest.approx(1 + 1 / 4 + 1 / 9)
    assert an.delta(2, 10**4) < an.delta(2)
    with pytest.raises(ValueError):
        an.delta(1.5)


def test_path_n1():
    assert an.expected_sinks_closed_form("path", 1).value == 1


def test_tree_has_only_probability_form():
    assert an.prob_positive_closed_form("tree", 9).value == 1
    with pytest.raises(an.UnsupportedForm):
        an.expected_sinks_closed_form("tree", 9)


def test_bounded_degree_forms():
    cf = an.expected_sinks_closed_form("bounded_degree", 50, k=3)
    assert (cf.form, cf.value) == (an.LOWER_BOUND, Fraction(50, 8))
    tv = an.expected_sinks_closed_form("bounded_degree", 50, k=3, table_variant=True)
    assert tv.value == Fraction(13, 8)
    pr = an.prob_positive_closed_form("bounded_degree", 50, k=3)
    assert pr.value == 1 - Fraction(7, 8) ** 13


def test_gnp_forms():
    cf = an.expected_sinks_closed_form("gnp", 200, p=0.02)
    assert cf.form == an.APPROXIMATION
    assert float(cf) == pytest.approx(200 * math.exp(-199 * 0.02 / 2))
    pr = an.prob_positive_closed_form("gnp", 200, p=0.02)
    assert pr.form == an.LIMIT and pr.value == 1.0


def test_power_law_forms():
    d = sum(k**-2.0 for k in range(1, 100))
    assert float(an.expected_sinks_closed_form("power_law", 100, a=2)) == pytest.approx(100 / (2 * d))
    pr = an.prob_positive_closed_form("power_law", 100, a=2)
    assert float(pr) == pytest.approx(1 - (1 - (2 - math.sqrt(2)) / (2 * d)) ** 100)


def test_degree_sum_matches_enumeration():
    g = generate(GraphClassSpec("gnp", 7, p=0.5, seed=2))
    assert an.degree_sum_expected(g) == enumerate_exact(g).expected_sinks


def test_monte_carlo_deterministic_and_close():
    g = generate(GraphClassSpec("cycle", 8))
    e1, p1 = an.monte_carlo(g, 20_000, 3)
    e2, _ = an.monte_carlo(g, 20_000, 3)
    assert e1 == e2
    exact = enumerate_exact(g)
    assert an.judge(e1, exact.expected_sinks, an.EXACT).verdict == "within-tolerance"
    assert an.judge(p1, exact.prob_positive, an.EXACT).verdict == "within-tolerance"


def test_sample_counts_in_range():
    g = generate(GraphClassSpec("star", 6))
    a = an.sample_sink_counts(g, 1000, 1, batch=128)
    assert a.shape == (1000,)
    assert np.all((a >= 1) & (a <= 5))
    with pytest.raises(ValueError):
        an.sample_sink_counts(g, 0, 1)


def test_judge_bound():
    rep = an.EstimateReport(1.0, 0.1, 100, 0)
    assert an.judge(rep, 1.3, an.LOWER_BOUND).verdict == "bound-satisfied"
    assert an.judge(rep, 1.5, an.LOWER_BOUND).verdict == "fail"
