"""Command-line front end.

Exit status: 0 on success or a verified trace, 1 when verification fails,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

import numpy as np

from sinklock import analytics as an
from sinklock import report
from sinklock.classical import classical_linear_order_rgm, random_model, verify_classical_trace
from sinklock.distsim import DelaySpec, dist_simulate
from sinklock.engine import ResourceModel, simulate_random_orientation_rgm
from sinklock.graphs import CLASSES, Graph, GraphClassSpec, GraphError, generate
from sinklock.orientation import ENUMERATION_CAP, enumerate_exact
from sinklock import trace as tr
from sinklock.verify import verify_orientation_trace


def _default_seed() -> int:
    raw = os.environ.get("SINKLOCK_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"SINKLOCK_SEED must be an integer, got {raw!r}") from None


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part.strip("-"):
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _add_graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--class", dest="cls", choices=CLASSES)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--in", dest="inp", metavar="PATH")


def _add_common(p: argparse.ArgumentParser, fmt: bool = True) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", metavar="PATH")
    if fmt:
        p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sinklock", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph as an edge list")
    p.add_argument("pos_class", nargs="?", choices=CLASSES, metavar="CLASS")
    p.add_argument("pos_n", nargs="?", type=int, metavar="N")
    _add_graph_flags(p)
    _add_common(p, fmt=False)

    p = sub.add_parser("estimate", help="closed form, exact and Monte Carlo values for one graph")
    _add_graph_flags(p)
    p.add_argument("--trials", type=int, default=10_000)
    _add_common(p)

    p = sub.add_parser("table", help="closed form vs exact vs Monte Carlo for several classes and sizes")
    p.add_argument("--ns", type=_int_list, default=_int_list("3-8"), help="e.g. 3-8 or 3,5,10")
    p.add_argument("--classes", default="path,star,cycle,complete")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--a", type=float, default=2.0)
    p.add_argument("--trials", type=int, default=10_000)
    _add_common(p)

    p = sub.add_parser("simulate", help="run a centralized mechanism and write its trace")
    _add_graph_flags(p)
    p.add_argument("--mechanism", choices=("orientation", "classical"), default="orientation")
    p.add_argument("--procs", type=int, default=10, help="classical: number of processes")
    p.add_argument("--resources", type=int, default=5, help="classical: number of resource classes")
    p.add_argument("--max-rounds", type=int)
    _add_common(p, fmt=False)

    p = sub.add_parser("dist-sim", help="run the message-passing protocol and write its trace")
    _add_graph_flags(p)
    p.add_argument("--delay", default="zero", help="zero | constant:V | uniform:LO,HI | discrete:V1,V2,...")
    p.add_argument("--delay-seed", type=int, default=0)
    p.add_argument("--max-rounds", type=int)
    _add_common(p, fmt=False)

    p = sub.add_parser("verify", help="check a trace against the priority-order characterization")
    p.add_argument("--in", dest="inp", metavar="PATH", required=True)
    p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("rounds", help="recursion model vs empirical mean rounds")
    p.add_argument("--specs", default="path:16,cycle:16,complete:5", help="CLASS:N[,CLASS:N...]")
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--runs", type=int, default=1000)
    _add_common(p)
    return parser


def _write(args, text: str) -> None:
    if not args.out:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(args.out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sinklock-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, args.out)
    except BaseException:
        os.unlink(tmp)
        raise


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "out" and v is not None}


def _graph(args, parser) -> tuple[Graph, GraphClassSpec | None]:
    if args.inp and args.cls:
        parser.error("give either --in or --class, not both")
    if args.inp:
        try:
            with open(args.inp) as fh:
                return Graph.from_edgelist(fh.read()), None
        except (OSError, GraphError) as exc:
            parser.error(f"--in: {exc}")
    if not args.cls or args.n is None:
        parser.error("a graph source is required: --class and --n, or --in")
    try:
        spec = GraphClassSpec(args.cls, args.n, k=args.k, p=args.p, a=args.a, seed=args.seed)
        return generate(spec), spec
    except GraphError as exc:
        parser.error(f"--class {args.cls}: {exc}")


def cmd_gen(args, parser) -> int:
    args.cls = args.cls or args.pos_class
    args.n = args.n if args.n is not None else args.pos_n
    g, _ = _graph(args, parser)
    _write(args, g.to_edgelist())
    return 0


def cmd_estimate(args, parser) -> int:
    g, spec = _graph(args, parser)
    if args.trials < 1:
        parser.error("--trials must be >= 1")
    mc_e, mc_p = an.monte_carlo(g, args.trials, args.seed)
    exact_e = an.degree_sum_expected(g)
    exact_p = enumerate_exact(g).prob_positive if g.m <= ENUMERATION_CAP else None
    rows = []
    for kind, exact, mc, closed_form in (
        ("expected_sinks", exact_e, mc_e, an.expected_sinks_closed_form),
        ("prob_positive", exact_p, mc_p, an.prob_positive_closed_form),
    ):
        row = {
            "class": spec.cls if spec else "file", "n": g.n, "params": spec.params() if spec else "",
            "kind": kind, "form": "", "formula_value": "", "exact_value": report.fmt(exact),
            "mc_estimate": report.fmt(mc.estimate), "mc_se": report.fmt(mc.se),
            "trials": args.trials, "seed": args.seed, "verdict": "",
        }
        if spec is not None:
            try:
                cf = closed_form(spec)
                row.update(form=cf.form, formula_value=report.fmt(float(cf.value)),
                           verdict=report._verdict(cf, exact, mc, exact_e))
            except an.UnsupportedForm as exc:
                row["verdict"] = f"error: {exc}"
        rows.append(row)
    _emit(args, rows, report.TABLE_COLUMNS)
    return 0


def _emit(args, rows, columns) -> None:
    config = _config(args)
    text = report.to_json(rows, config) if args.format == "json" else report.to_csv(rows, columns, config)
    _write(args, text)


def cmd_table(args, parser) -> int:
    classes = [c.strip() for c in args.classes.split(",") if c.strip()]
    bad = [c for c in classes if c not in CLASSES]
    if bad:
        parser.error(f"--classes: unknown class {bad[0]!r}")
    if args.trials < 1:
        parser.error("--trials must be >= 1")
    rows = report.table_rows(classes, args.ns, args.trials, args.seed, k=args.k, p=args.p, a=args.a)
    _emit(args, rows, report.TABLE_COLUMNS)
    return 0


def cmd_simulate(args, parser) -> int:
    config = _config(args)
    if args.mechanism == "classical":
        if args.procs < 1 or args.resources < 1:
            parser.error("--procs and --resources must be >= 1")
        model = random_model(np.random.default_rng(args.seed), args.procs, args.resources)
        order = list(range(args.resources))
        run = classical_linear_order_rgm(model, order, args.seed, max_steps=args.max_rounds)
        header = {
            "config": config, "mechanism": "classical", "class_order": order,
            "capacity": {str(r): c for r, c in model.capacity.items()},
            "requests": {str(i): {str(r): x for r, x in req.items()} for i, req in model.requests.items()},
            "complete": run.complete, "steps": len(run.steps),
        }
        _write(args, tr.dumps(run.trace, header))
        return 0
    g, _ = _graph(args, parser)
    run = simulate_random_orientation_rgm(g, args.seed, args.max_rounds)
    header = {
        "config": config, "mechanism": "orientation", "n": g.n, "edges": [list(e) for e in g.edges],
        "complete": run.complete, "rounds": run.rounds,
    }
    _write(args, tr.dumps(run.trace, header))
    return 0


def _parse_delay(text: str, seed: int, parser) -> DelaySpec:
    name, _, rest = text.partition(":")
    try:
        params = tuple(float(x) for x in rest.split(",")) if rest else ()
        return DelaySpec(name, params, seed)
    except ValueError as exc:
        parser.error(f"--delay: {exc}")


def cmd_dist_sim(args, parser) -> int:
    g, _ = _graph(args, parser)
    delay = _parse_delay(args.delay, args.delay_seed, parser)
    run = dist_simulate(g, args.seed, delay, args.max_rounds)
    header = {
        "config": _config(args), "mechanism": "distributed", "n": g.n, "edges": [list(e) for e in g.edges],
        "delay": delay.to_dict(), "complete": run.complete, "rounds": run.rounds, "messages": run.messages,
        "messages_per_round": {str(k): v for k, v in sorted(run.messages_per_round.items())},
        "sim_time": run.sim_time,
    }
    _write(args, tr.dumps(run.trace, header))
    return 0


def cmd_verify(args, parser) -> int:
    try:
        with open(args.inp) as fh:
            header, events = tr.loads(fh.read())
    except (OSError, ValueError) as exc:
        parser.error(f"--in: {exc}")
    if header is None:
        parser.error("--in: trace lacks a run_config header")
    mechanism = header.get("mechanism")
    if mechanism == "classical":
        model = ResourceModel(
            {int(r): c for r, c in header["capacity"].items()},
            {int(i): {int(r): x for r, x in req.items()} for i, req in header["requests"].items()},
        )
        ok, problems = verify_classical_trace(model, header["class_order"], events)
    elif mechanism in ("orientation", "distributed"):
        g = Graph(header["n"], tuple(tuple(e) for e in header["edges"]))
        rep = verify_orientation_trace(g, events)
        problems = rep.violations()
        if not rep.complete:
            problems.append("run did not serve every process")
        ok = rep.ok and rep.complete
    else:
        parser.error(f"--in: unknown mechanism {mechanism!r}")
    lines = ["verified" if ok else "VIOLATION"] + problems
    _write(args, "\n".join(lines) + "\n")
    return 0 if ok else 1


def cmd_rounds(args, parser) -> int:
    specs = []
    for item in args.specs.split(","):
        cls, _, n = item.partition(":")
        try:
            specs.append(GraphClassSpec(cls.strip(), int(n), k=args.k, p=args.p, a=args.a, seed=args.seed))
        except (GraphError, ValueError) as exc:
            parser.error(f"--specs {item!r}: {exc}")
    if args.runs < 1:
        parser.error("--runs must be >= 1")
    _emit(args, report.rounds_rows(specs, args.runs, args.seed), report.ROUNDS_COLUMNS)
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "estimate": cmd_estimate,
    "table": cmd_table,
    "simulate": cmd_simulate,
    "dist-sim": cmd_dist_sim,
    "verify": cmd_verify,
    "rounds": cmd_rounds,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    sub = parser._subparsers._group_actions[0].choices[args.command]
    return COMMANDS[args.command](args, sub)


if __name__ == "__main__":
    sys.exit(main())
