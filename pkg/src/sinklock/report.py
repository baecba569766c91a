"""Tabular reports: closed form vs exact vs Monte Carlo, and round counts."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import numpy as np

from sinklock import analytics as an
from sinklock.coins import derive_seed
from sinklock.engine import simulate_random_orientation_rgm
from sinklock.graphs import GraphClassSpec, GraphError, generate
from sinklock.orientation import ENUMERATION_CAP, enumerate_exact

TABLE_COLUMNS = (
    "class", "n", "params", "kind", "form", "formula_value", "exact_value",
    "mc_estimate", "mc_se", "trials", "seed", "verdict",
)
ROUNDS_COLUMNS = ("class", "n", "params", "model_rounds", "empirical_mean", "empirical_se", "runs", "seed", "note")

APPROX_REL_TOL = 0.05


def fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return f"{float(x):.12g}"


def _verdict(cf: an.ClosedForm, exact, mc: an.EstimateReport, exact_e=None) -> str:
    if cf.form == an.EXACT:
        if exact is not None:
            return "match" if Fraction(exact) == Fraction(cf.value) else "mismatch"
        return an.judge(mc, cf.value, an.EXACT).verdict
    if cf.form == an.LOWER_BOUND:
        if exact is not None:
            return "bound-satisfied" if exact >= cf.value else "fail"
        return an.judge(mc, cf.value, an.LOWER_BOUND).verdict
    if cf.form == an.APPROXIMATION:
        ref = float(exact) if exact is not None else mc.estimate
        rel = abs(ref - float(cf.value)) / float(cf.value)
        return "within-tolerance" if rel <= APPROX_REL_TOL else "fail"
    # Markov bound for Pr[X > 0] on G(n, p): Pr <= min(1, E[X])
    bound = min(1.0, float(exact_e))
    ref = float(exact) if exact is not None else mc.estimate - 4 * mc.se
    return "bound-satisfied" if ref <= bound else "fail"


def _blank(kind: str) -> dict:
    return {"kind": kind, "form": "", "formula_value": "", "exact_value": "", "mc_estimate": "", "mc_se": ""}


def table_rows(
    classes: list[str],
    ns: list[int],
    trials: int,
    seed: int,
    k: int | None = None,
    p: float | None = None,
    a: float | None = None,
    cap: int = ENUMERATION_CAP,
) -> list[dict]:
    rows = []
    for cls in classes:
        for n in ns:
            params = {"k": k} if cls == "bounded_degree" else {"p": p} if cls == "gnp" else {"a": a} if cls == "power_law" else {}
            base = {"class": cls, "n": n, "params": ";".join(f"{key}={v:g}" for key, v in params.items() if v is not None),
                    "trials": trials, "seed": seed}
            try:
                spec = GraphClassSpec(cls, n, seed=seed, **params)
                g = generate(spec)
            except GraphError as exc:
                for kind in ("expected_sinks", "prob_positive"):
                    rows.append({**base, **_blank(kind), "verdict": f"error: {exc}"})
                continue
            stats = enumerate_exact(g, cap=cap) if g.m <= cap else None
            exact_e = an.degree_sum_expected(g)
            exact_p = stats.prob_positive if stats else None
            mc_e, mc_p = an.monte_carlo(g, trials, seed)
            for kind, closed_form, exact, mc in (
                ("expected_sinks", an.expected_sinks_closed_form, exact_e, mc_e),
                ("prob_positive", an.prob_positive_closed_form, exact_p, mc_p),
            ):
                try:
                    cf = closed_form(spec)
                except (an.UnsupportedForm, ValueError) as exc:
                    rows.append({**base, **_blank(kind), "exact_value": fmt(exact), "mc_estimate": fmt(mc.estimate),
                                 "mc_se": fmt(mc.se), "verdict": f"error: {exc}"})
                    continue
                rows.append({
                    **base, "kind": kind, "form": cf.form, "formula_value": fmt(float(cf.value)),
                    "exact_value": fmt(exact), "mc_estimate": fmt(mc.estimate), "mc_se": fmt(mc.se),
                    "verdict": _verdict(cf, exact, mc, exact_e),
                })
    return rows


def rounds_rows(specs: list[GraphClassSpec], runs: int, seed: int) -> list[dict]:
    """Recursion model vs empirical mean rounds of the centralized mechanism."""
    rows = []
    for spec in specs:
        g = generate(spec)
        try:
            model = fmt(an.expected_rounds(spec))
            note = "recursion is a heuristic model; agreement is not asserted"
        except (an.Divergence, an.UnsupportedForm) as exc:
            model, note = "", f"model unavailable: {exc}"
        counts = []
        incomplete = 0
        for i in range(runs):
            res = simulate_random_orientation_rgm(g, derive_seed(seed, i))
            counts.append(res.rounds)
            incomplete += not res.complete
        arr = np.asarray(counts, dtype=float)
        se = arr.std(ddof=1) / np.sqrt(runs) if runs > 1 else 0.0
        if incomplete:
            note += f"; {incomplete} runs hit max_rounds"
        rows.append({
            "class": spec.cls, "n": spec.n, "params": spec.params(), "model_rounds": model,
            "empirical_mean": fmt(arr.mean()), "empirical_se": fmt(se), "runs": runs, "seed": seed, "note": note,
        })
    return rows


def to_csv(rows: list[dict], columns, config: dict | None = None) -> str:
    buf = io.StringIO()
    if config is not None:
        buf.write("# run_config: " + json.dumps(config, sort_keys=True) + "\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def to_json(rows: list[dict], config: dict | None = None) -> str:
    return json.dumps({"run_config": config, "rows": rows}, indent=2, sort_keys=True) + "\n"
