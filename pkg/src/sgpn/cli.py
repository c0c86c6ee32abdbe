"""Command-line interface: one subcommand per stage of the evaluation."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import Optional, Sequence

from . import catalog, pipeline
from .chain import build_tpm, stationary_distribution, stationary_residual
from .errors import SGPNError, SolverError
from .game import indifference_residuals, solve_ne, verify_equilibrium
from .modelfile import dumps
from .montecarlo import CONVERGENCE_COLUMNS, SimConfig, convergence_report, simulate
from .reachability import build_reachability

log = logging.getLogger("sgpn")


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _unsupported(args, *formats):
    if args.format not in formats:
        raise ValueError(f"--format {args.format} is not supported by '{args.command}'")


def cmd_list(args) -> str:
    items = catalog.list_models()
    if args.format == "json":
        return _json(items)
    if args.format == "csv":
        return _csv(["key", "title", "summary"], [[i["key"], i["title"], i["summary"]] for i in items])
    return "".join(f"{i['key']:<20} {i['summary']}\n" for i in items)


def cmd_show(args) -> str:
    model = pipeline.load(args.key or args.model)
    net = model.net
    if args.format == "json":
        return dumps(model.doc)
    _unsupported(args, "text")
    lines = [f"{model.ref}: {len(net.places)} places, {len(net.transitions)} transitions"]
    lines.append("places:")
    for p in net.places:
        tag = "" if p.tag == "plain" else f" [{p.tag}]"
        lines.append(f"  {p.id}{tag}: {p.description}")
    lines.append("transitions:")
    for t in net.transitions:
        ins = ", ".join(net.places[i].id for i in net.inputs(t.id))
        outs = ", ".join(net.places[i].id for i in net.outputs(t.id))
        act = f" action={t.action}" if t.action else ""
        lines.append(f"  {t.id} ({t.owner}{act}): {ins} -> {outs}  {t.description}")
    if model.doc.rewards is not None:
        lines.append("rewards: " + " ".join(f"{k}={_fmt(v)}" for k, v in model.doc.rewards.as_dict().items()))
    flagged = sorted(k for k, v in model.doc.provenance.items() if v == catalog.RECONSTRUCTED)
    if flagged:
        lines.append("reconstructed: " + ", ".join(flagged))
    return "\n".join(lines) + "\n"


def cmd_ne(args) -> str:
    model = pipeline.load(args.model)
    if model.doc.rewards is None:
        raise SolverError(f"{model.ref} has no reward table")
    r = model.doc.rewards
    s = solve_ne(r)
    res = indifference_residuals(r, s)
    check = verify_equilibrium(r, s)
    if args.format == "json":
        return _json(
            {"P_A": s.p_attack, "P_D": s.p_defend, "indifference_residuals": list(res),
             "is_equilibrium": check.is_equilibrium, "max_gain": check.max_gain}
        )
    if args.format == "csv":
        return _csv(["P_A", "P_D"], [[repr(s.p_attack), repr(s.p_defend)]])
    return f"P_A={_fmt(s.p_attack)} P_D={_fmt(s.p_defend)}\n"


def cmd_analyze(args) -> str:
    report = pipeline.analyze(args.model, args.p_attack, args.p_defend, full=args.full)
    if args.format == "json":
        return _json(report.to_dict())
    if args.format == "csv":
        o = report.outcome
        return _csv(
            ["model", "P_A", "P_D", "no_attack", "success", "defended"],
            [[report.model, repr(report.strategy.p_attack) if report.strategy else "",
              repr(report.strategy.p_defend) if report.strategy else "",
              repr(o.no_attack), repr(o.attack_success), repr(o.attack_defended)]],
        )
    return report.to_text() + "\n"


def _graph(args):
    model = pipeline.load(args.model)
    strategy, _, _ = pipeline.resolve_strategy(model, args.p_attack, args.p_defend)
    net = pipeline.working_net(model, args.full)
    return net, build_reachability(net, strategy, max_nodes=args.max_nodes)


def cmd_reach(args) -> str:
    net, g = _graph(args)
    if args.format == "json":
        return _json(g.to_dict())
    if args.format == "csv":
        return _csv(
            ["src", "dst", "transition", "probability"],
            [[e.src, e.dst, e.transition, repr(e.probability)] for e in g.edges],
        )
    lines = [f"{len(g.nodes)} nodes, {len(g.edges)} edges" + (" (truncated)" if g.truncated else "")]
    lines += [f"  [{i}] {m.label(net)}" for i, m in enumerate(g.nodes)]
    lines += [f"  {e.src} -> {e.dst}  {e.transition}  p={_fmt(e.probability)}" for e in g.edges]
    return "\n".join(lines) + "\n"


def cmd_steady(args) -> str:
    net, g = _graph(args)
    m = build_tpm(g)
    v = stationary_distribution(m)
    labels = [n.label(net) for n in g.nodes]
    if args.format == "json":
        return _json(
            {"states": labels, "tpm": m.tolist(), "stationary": v.tolist(),
             "residual": stationary_residual(m, v)}
        )
    if args.format == "csv":
        return _csv(["node", "state", "probability"], [[i, labels[i], repr(float(p))] for i, p in enumerate(v)])
    lines = ["transition probability matrix:"]
    lines += ["  " + " ".join(_fmt(x) for x in row) for row in m]
    lines.append("stationary distribution:")
    lines += [f"  [{i}] {labels[i]}: {_fmt(p)}" for i, p in enumerate(v)]
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> str:
    rows = pipeline.sweep(args.model, args.param, args.start, args.stop, args.step,
                          args.p_attack, args.p_defend)
    cols = pipeline.SWEEP_COLUMNS
    if args.format == "json":
        return _json(rows)
    if args.format == "csv":
        return _csv(cols, [[r["param"], repr(r["value"]), repr(r["no_attack"]), repr(r["success"]),
                            repr(r["defended"])] for r in rows])
    return "".join(
        f"{r['param']}={_fmt(r['value'])} no_attack={_fmt(r['no_attack'])} "
        f"success={_fmt(r['success'])} defended={_fmt(r['defended'])}\n"
        for r in rows
    )


def cmd_simulate(args) -> str:
    model = pipeline.load(args.model)
    strategy, _, _ = pipeline.resolve_strategy(model, args.p_attack, args.p_defend)
    net = pipeline.working_net(model, args.full)
    if args.checkpoints:
        checkpoints = [int(x) for x in args.checkpoints.split(",")]
        rows = convergence_report(net, strategy, checkpoints, args.seed, args.max_steps)
        if args.format == "json":
            return _json([r.__dict__ for r in rows])
        if args.format == "csv":
            return _csv(CONVERGENCE_COLUMNS, [[r.runs, repr(r.empirical_success),
                                               repr(r.analytic_success), repr(r.abs_error)] for r in rows])
        return "".join(
            f"runs={r.runs} empirical={_fmt(r.empirical_success)} analytic={_fmt(r.analytic_success)} "
            f"abs_error={_fmt(r.abs_error)}\n"
            for r in rows
        )
    cfg = SimConfig(runs=args.runs, seed=args.seed, max_steps=args.max_steps, strategy=strategy,
                    timed=args.timed, workers=args.workers)
    res = simulate(net, cfg)
    if args.format == "json":
        return _json(res.to_dict())
    freq = res.frequencies
    if args.format == "csv":
        return _csv(["outcome", "count", "frequency"],
                    [[k, res.counts[k], repr(freq[k])] for k in res.counts])
    lines = [f"runs={res.runs} completed={res.completed} truncated={res.truncated}"]
    lines += [f"  {k}: {res.counts[k]} ({_fmt(freq[k])})" for k in res.counts]
    lines += [f"  mean reward {p}: {_fmt(x)}" for p, x in zip(res.players, res.mean_reward)]
    if res.mean_time is not None:
        lines.append(f"  mean time to outcome: {_fmt(res.mean_time)}")
    return "\n".join(lines) + "\n"


def cmd_export(args) -> str:
    return dumps(pipeline.load(args.key or args.model).doc)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default="replay-defense", help="catalog key or model file path")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--runs", type=int, default=100_000)
    common.add_argument("-v", "--verbose", action="store_true")

    strat = argparse.ArgumentParser(add_help=False)
    strat.add_argument("--p-attack", type=float, help="override the attacker's attack probability")
    strat.add_argument("--p-defend", type=float, help="override the defender's defend probability")
    strat.add_argument("--full", action="store_true", help="use the full net, not the reduced model")

    parser = argparse.ArgumentParser(prog="sgpn", description="Stochastic game Petri net analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", parents=[common], help="list catalog models").set_defaults(func=cmd_list)
    p = sub.add_parser("show", parents=[common], help="describe a model")
    p.add_argument("key", nargs="?")
    p.set_defaults(func=cmd_show)
    sub.add_parser("ne", parents=[common], help="solve the mixed equilibrium").set_defaults(func=cmd_ne)
    sub.add_parser("analyze", parents=[common, strat], help="run the full evaluation").set_defaults(
        func=cmd_analyze
    )
    for name, func in (("reach", cmd_reach), ("steady", cmd_steady)):
        p = sub.add_parser(name, parents=[common, strat])
        p.add_argument("--max-nodes", type=int, default=10_000)
        p.set_defaults(func=func)
    p = sub.add_parser("sweep", parents=[common, strat], help="sweep P_A or P_D")
    p.add_argument("--param", choices=("P_A", "P_D"), default="P_D")
    p.add_argument("--from", dest="start", type=float, default=0.0)
    p.add_argument("--to", dest="stop", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.1)
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("simulate", parents=[common, strat], help="seeded Monte Carlo")
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--checkpoints", help="comma-separated run counts for a convergence table")
    p.add_argument("--timed", action="store_true", help="report mean time to outcome from rates")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("export", parents=[common], help="write a model file")
    p.add_argument("key", nargs="?")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _emit(args, args.func(args))
    except SGPNError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
