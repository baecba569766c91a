from fractions import Fraction

from sinklock.graphs import GraphClassSpec
from sinklock.report import ROUNDS_COLUMNS, TABLE_COLUMNS, fmt, rounds_rows, table_rows, to_csv


def test_fmt():
    assert fmt(Fraction(3, 4)) == "3/4"
    assert fmt(0.1 + 0.2) == "0.3"
    assert fmt(None) == ""


def test_table_rows_verdicts():
    rows = table_rows(["path", "star", "cycle", "complete", "tree"], [4, 6], 2000, 0)
    by = {(r["class"], r["n"], r["kind"]): r for r in rows}
    for cls in ("path", "star", "cycle", "complete"):
        for n in (4, 6):
            assert by[(cls, n, "expected_sinks")]["verdict"] == "match"
            assert by[(cls, n, "prob_positive")]["verdict"] == "match"
    assert by[("tree", 4, "expected_sinks")]["verdict"].startswith("error")
    assert by[("tree", 4, "prob_positive")]["verdict"] == "match"


def test_table_bounds_and_errors():
    rows = table_rows(["bounded_degree", "power_law", "gnp", "cycle"], [2, 40], 1000, 1, k=3, p=0.1, a=2.0)
    verdicts = {(r["class"], r["n"], r["kind"]): r["verdict"] for r in rows}
    assert verdicts[("cycle", 2, "expected_sinks")].startswith("error")
    assert verdicts[("bounded_degree", 40, "expected_sinks")] == "bound-satisfied"
    assert verdicts[("power_law", 40, "expected_sinks")] == "bound-satisfied"
    assert verdicts[("gnp", 40, "prob_positive")] == "bound-satisfied"


def test_csv_header_and_columns():
    rows = rounds_rows([GraphClassSpec("cycle", 5)], 10, 0)
    text = to_csv(rows, ROUNDS_COLUMNS, {"seed": 0})
    lines = text.splitlines()
    assert lines[0] == '# run_config: {"seed": 0}'
    assert lines[1] == ",".join(ROUNDS_COLUMNS)
    assert len(TABLE_COLUMNS) == 12
