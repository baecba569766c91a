from dataclasses import replace

from sinklock.engine import simulate_random_orientation_rgm
from sinklock.graphs import GraphClassSpec, generate
from sinklock.trace import GRANTED, ORIENTATION_FIXED, RELEASED, TERMINATED, Event
from sinklock.verify import verify_orientation_trace


def _run(cls="cycle", n=8, seed=0, **params):
    g = generate(GraphClassSpec(cls, n, **params))
    return g, simulate_random_orientation_rgm(g, seed)


def test_clean_runs_pass():
    for seed in range(30):
        g, run = _run(seed=seed)
        rep = verify_orientation_trace(g, run.trace)
        assert rep.ok and rep.complete, rep.violations()


def _non_sink(g, trace, rnd):
    tails = {int(e.direction.split(">")[0]) for e in trace if e.round == rnd and e.type == ORIENTATION_FIXED}
    return min(tails)


def test_injected_non_sink_grant_rejected():
    g, run = _run(seed=2)
    victim = _non_sink(g, run.trace, 1)
    extra = [Event(GRANTED, 1, process=victim), Event(RELEASED, 1, process=victim), Event(TERMINATED, 1, process=victim)]
    idx = max(k for k, e in enumerate(run.trace) if e.round == 1) + 1
    bad = run.trace[:idx] + extra + run.trace[idx:]
    rep = verify_orientation_trace(g, bad)
    assert not rep.ok
    assert any("without being a sink" in v for v in rep.violations())


def test_flipped_arc_rejected():
    g, run = _run(seed=4)
    trace = list(run.trace)
    for k, e in enumerate(trace):
        if e.type == ORIENTATION_FIXED:
            t, h = e.direction.split(">")
            trace[k] = replace(e, direction=f"{h}>{t}")
            break
    assert not verify_orientation_trace(g, trace).ok


def test_missing_round_start_and_gap():
    g, run = _run(seed=1)
    trace = [e for e in run.trace if not (e.round == 1 and e.type == "round_start")]
    assert any("round_start" in v for v in verify_orientation_trace(g, trace).violations())


def test_truncated_trace_incomplete():
    g, run = _run(seed=6)
    trace = [e for e in run.trace if e.round == 1]
    rep = verify_orientation_trace(g, trace)
    assert not rep.complete
    # unserved neighbours stay incomparable, which the capacity check catches
    assert rep.rounds[0].orientation.condition1_ok
    assert not rep.rounds[0].completion.condition2_ok


def test_bounded_degree_runs_pass():
    for seed in range(10):
        g, run = _run("bounded_degree", 12, seed=seed, k=3)
        assert verify_orientation_trace(g, run.trace).ok
