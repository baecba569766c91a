import json

import pytest

from sinklock.cli import main
from sinklock.graphs import Graph


def _run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_gen_positional(capsys):
    code, out = _run(["gen", "path", "3"], capsys)
    assert code == 0
    assert Graph.from_edgelist(out).edges == ((0, 1), (1, 2))


def test_gen_to_file_round_trips(tmp_path, capsys):
    out = tmp_path / "g.txt"
    assert main(["gen", "--class", "gnp", "--n", "20", "--p", "0.2", "--seed", "3", "--out", str(out)]) == 0
    g = Graph.from_edgelist(out.read_text())
    assert g.n == 20
    # no stray temp files left behind
    assert [p.name for p in tmp_path.iterdir()] == ["g.txt"]


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--class", "cycle", "--n", "2"],
        ["gen"],
        ["estimate", "--class", "path", "--n", "4", "--trials", "0"],
        ["table", "--classes", "hypercube"],
        ["gen", "--class", "bounded_degree", "--n", "5"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert "error" in capsys.readouterr().err


def test_env_seed(monkeypatch, capsys):
    monkeypatch.setenv("SINKLOCK_SEED", "5")
    _, a = _run(["gen", "--class", "tree", "--n", "12"], capsys)
    _, b = _run(["gen", "--class", "tree", "--n", "12", "--seed", "5"], capsys)
    assert a == b


def test_estimate_csv(capsys):
    code, out = _run(["estimate", "--class", "cycle", "--n", "6", "--trials", "2000", "--seed", "1"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# run_config: ")
    assert lines[1].startswith("class,n,params,kind")
    assert "3/2" in lines[2] and lines[2].endswith("match")


def test_table_json_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["table", "--ns", "3-5", "--classes", "path,complete", "--trials", "500", "--format", "json"]
    main(argv + ["--out", str(a)])
    main(argv + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert len(doc["rows"]) == 12
    assert {r["verdict"] for r in doc["rows"] if r["kind"] == "expected_sinks"} == {"match"}


def test_simulate_then_verify(tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    assert main(["simulate", "--class", "cycle", "--n", "8", "--seed", "2", "--out", str(trace)]) == 0
    code, out = _run(["verify", "--in", str(trace)], capsys)
    assert (code, out) == (0, "verified\n")


def test_verify_reports_violation(tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    main(["simulate", "--class", "path", "--n", "4", "--seed", "0", "--out", str(trace)])
    lines = trace.read_text().splitlines()
    arcs = [json.loads(x) for x in lines if '"orientation_fixed"' in x and '"round": 1,' in x]
    tail = int(arcs[0]["direction"].split(">")[0])
    first_end = max(k for k, x in enumerate(lines) if '"round": 1,' in x or '"round": 1}' in x)
    extra = [json.dumps({"type": t, "round": 1, "process": tail}) for t in ("granted", "released", "terminated")]
    trace.write_text("\n".join(lines[: first_end + 1] + extra + lines[first_end + 1:]) + "\n")
    code, out = _run(["verify", "--in", str(trace)], capsys)
    assert code == 1
    assert out.startswith("VIOLATION")
    assert "without being a sink" in out


def test_classical_and_dist_verify(tmp_path, capsys):
    c, d = tmp_path / "c.jsonl", tmp_path / "d.jsonl"
    assert main(["simulate", "--mechanism", "classical", "--procs", "6", "--resources", "3", "--out", str(c)]) == 0
    assert main(["dist-sim", "--class", "complete", "--n", "5", "--delay", "uniform:0.1,2", "--out", str(d)]) == 0
    assert _run(["verify", "--in", str(c)], capsys)[0] == 0
    assert _run(["verify", "--in", str(d)], capsys)[0] == 0
    header = json.loads(d.read_text().splitlines()[0])
    assert header["type"] == "run_config" and header["messages"] > 0


def test_bad_delay_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["dist-sim", "--class", "path", "--n", "3", "--delay", "uniform:3,1"])
    assert exc.value.code == 2


def test_rounds_small(capsys):
    code, out = _run(["rounds", "--specs", "path:6,complete:40", "--runs", "2"], capsys)
    assert code == 0
    rows = out.splitlines()[2:]
    assert rows[0].startswith("path,6,")
    assert "model unavailable" in rows[1]
