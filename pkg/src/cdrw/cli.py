"""
Command-line harness: ``cdrw gen | run | sweep | cost``.

Exit status is 0 on success, 1 on a usage error and 2 on a data error
(unreadable or inconsistent input files, missing labels, bad parameters).

``--config FILE`` reads ``key=value`` lines whose keys are flag names without
the leading dashes (``nc=1024``, ``max-walk-c=4``); flags given on the command
line override the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .cdst import CdstConfig, run_cdst_detailed
from .congest import detect_all_congest, simulate_cdrw
from .detect import CdrwConfig, detect_all, detect_community
from .experiments import estimate_params, preset, resolve_delta, rows_to_csv, run_sweep
from .graph import PpmParams, generate_gnpq, read_edgelist, read_labels, write_edgelist, write_labels
from .kmachine import conversion_estimate, cross_machine_messages, rvp_partition
from .metrics import CSV_FIELDS, evaluate_assignment


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


REQUIRED = {"gen": ["nc", "p", "out"], "run": ["graph", "out"], "sweep": ["experiment", "out"], "cost": ["graph"]}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _delta_arg(text: str):
    if text in ("analytic", "exact"):
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number, 'analytic' or 'exact'") from None
    if value < 0:
        raise argparse.ArgumentTypeError("delta must be nonnegative")
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cdrw", description=__doc__.strip().splitlines()[0])
    ap.add_argument("--config", help="key=value file with default flag values")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="sample a planted-partition graph")
    gen.add_argument("--nc", type=int, help="vertices per block")
    gen.add_argument("--r", type=int, default=1, help="number of blocks")
    gen.add_argument("--p", type=float)
    gen.add_argument("--q", type=float, default=0.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="output prefix; writes PREFIX.edges and PREFIX.labels")

    run = sub.add_parser("run", help="detect communities in a graph file")
    run.add_argument("algorithm", choices=["cdrw", "cdst"])
    run.add_argument("--graph", help="edge-list file")
    run.add_argument("--labels", help="ground-truth labels file")
    run.add_argument("--no-metrics", action="store_true", help="skip scoring (labels not needed)")
    run.add_argument("--p", type=float, help="model p for --delta analytic (estimated from labels if omitted)")
    run.add_argument("--q", type=float, help="model q for --delta analytic")
    run.add_argument("--delta", type=_delta_arg, default="analytic")
    run.add_argument("--max-walk-c", type=float, default=4.0, dest="max_walk_c")
    run.add_argument("--alpha", type=float, default=0.3)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", help="score CSV path")
    run.add_argument("--ledger", help="CONGEST cost ledger JSON path (cdrw only)")
    run.add_argument("--trace", help="per-walk-length JSON-lines trace path (cdrw only)")
    run.add_argument("--communities", help="write 'vertex community' lines here")

    sw = sub.add_parser("sweep", help="run a preset parameter sweep")
    sw.add_argument("--experiment",
                    choices=["gnp_accuracy", "ppm_pq", "ppm_r_fixed_block", "ppm_r_fixed_total"])
    sw.add_argument("--algorithm", choices=["cdrw", "cdst"], default="cdrw")
    sw.add_argument("--trials", type=int, default=10)
    sw.add_argument("--seed", type=int, default=0, help="base seed")
    sw.add_argument("--delta", type=_delta_arg, default="analytic")
    sw.add_argument("--max-walk-c", type=float, default=4.0, dest="max_walk_c")
    sw.add_argument("--alpha", type=float, default=0.3)
    sw.add_argument("--no-cost", action="store_true", help="skip CONGEST accounting (rounds/messages = 0)")
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--out")

    cost = sub.add_parser("cost", help="CONGEST and k-machine cost report for one seed")
    cost.add_argument("--graph")
    cost.add_argument("--labels")
    cost.add_argument("--k", type=int, nargs="+", default=[2, 4, 8])
    cost.add_argument("--source", type=int, help="seed vertex (default: random from --seed)")
    cost.add_argument("--p", type=float)
    cost.add_argument("--q", type=float)
    cost.add_argument("--delta", type=_delta_arg, default="analytic")
    cost.add_argument("--max-walk-c", type=float, default=4.0, dest="max_walk_c")
    cost.add_argument("--bandwidth", type=float, default=1.0)
    cost.add_argument("--seed", type=int, default=0)
    cost.add_argument("--out", help="JSON path (default: stdout)")
    return ap


def load_config(path) -> dict:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read config: {exc}") from None
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{i}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _parse(argv) -> argparse.Namespace:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        _apply_config(ap, args, argv, load_config(args.config))
    missing = ["--" + k.replace("_", "-") for k in REQUIRED[args.command] if getattr(args, k) is None]
    if missing:
        raise UsageError(f"missing required options: {', '.join(missing)}")
    return args


def _apply_config(ap, args, argv, conf: dict) -> None:
    # flags present on the command line win; file values fill the rest
    sub = ap._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    explicit = set()
    for tok in argv:
        if tok.startswith("--"):
            name = tok[2:].split("=", 1)[0].replace("-", "_")
            explicit.add(known[name].dest if name in known else name)
    for key, raw in conf.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if key in explicit:
            continue
        action = known[key]
        try:
            if isinstance(action, argparse._StoreTrueAction):
                value = raw.lower() in ("1", "true", "yes")
            elif action.nargs == "+":
                value = [action.type(v) for v in raw.replace(",", " ").split()]
            else:
                value = action.type(raw) if action.type else raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key}: {exc}") from None
        setattr(args, key, value)


def _load(args):
    try:
        g = read_edgelist(args.graph)
        truth = read_labels(args.labels) if args.labels else None
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot load graph: {exc}") from None
    if truth is not None and truth.labels.size != g.n:
        raise DataError("labels file does not cover every vertex")
    return g, truth


def _params(args, g, truth) -> PpmParams | None:
    if truth is None:
        return None
    est = estimate_params(g, truth, args.seed)
    p = est.p if args.p is None else args.p
    q = est.q if args.q is None else args.q
    return PpmParams(est.n_c, est.r, p, q, args.seed)


def _delta(args, g, truth) -> float:
    if isinstance(args.delta, float):
        return args.delta
    if truth is None:
        raise DataError(f"--delta {args.delta} needs --labels")
    return resolve_delta(args.delta, _params(args, g, truth), g, truth)


def cmd_gen(args) -> int:
    params = PpmParams(args.nc, args.r, args.p, args.q, args.seed)
    g, truth = generate_gnpq(params)
    prefix = Path(args.out)
    try:
        write_edgelist(g, prefix.with_name(prefix.name + ".edges"))
        write_labels(truth, prefix.with_name(prefix.name + ".labels"))
    except OSError as exc:
        raise DataError(f"cannot write output: {exc}") from None
    e = g.edges
    e_in = int(np.count_nonzero(truth.labels[e[:, 0]] == truth.labels[e[:, 1]]))
    print(f"n={g.n} m={g.m} e_in={e_in} e_out={g.m - e_in}")
    return 0


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def cmd_run(args) -> int:
    g, truth = _load(args)
    if truth is None and not args.no_metrics:
        raise DataError("scoring needs --labels (or pass --no-metrics)")
    if args.algorithm == "cdst":
        if args.ledger or args.trace:
            raise UsageError("--ledger and --trace apply to cdrw only")
        run = run_cdst_detailed(g, CdstConfig(args.alpha, args.seed))
        assignment, rounds, messages = run.assignment, run.rounds, 0
        delta = None
    else:
        delta = _delta(args, g, truth)
        cfg = CdrwConfig(delta=delta, walk_c=args.max_walk_c, seed=args.seed)
        assignment, ledger = detect_all_congest(g, cfg)
        rounds, messages = ledger.rounds, ledger.messages
        if args.trace:
            # the simulator reproduces these runs exactly; this pass only records the trace
            traces = []

            def traced(graph, s, c):
                res = detect_community(graph, s, c)
                traces.extend({"seed": s, **rec} for rec in res.trace)
                return res.members

            detect_all(g, cfg, detector=traced)
        if args.trace:
            _write(args.trace, "".join(json.dumps(rec) + "\n" for rec in traces))
        if args.ledger:
            meta = {"seed": args.seed, "delta": delta}
            if truth is not None:
                pp = _params(args, g, truth)
                meta.update(r=pp.r, p=pp.p, q=pp.q)
            _write(args.ledger, ledger.to_json(**meta) + "\n")

    row = {"n_c": g.n, "r": 1, "p": "", "q": "", "seed": args.seed, "aggregate_f": "",
           "aggregate_jaccard": "", "rounds": rounds, "messages": messages}
    if truth is not None:
        pp = _params(args, g, truth)
        rep = evaluate_assignment(assignment, truth)
        row.update(n_c=pp.n_c, r=pp.r, p=repr(pp.p), q=repr(pp.q),
                   aggregate_f=repr(rep.aggregate_f), aggregate_jaccard=repr(rep.aggregate_jaccard))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerow(row)
    _write(args.out, buf.getvalue())
    if args.communities:
        labels = assignment.labels()
        _write(args.communities, "".join(f"{v} {c}\n" for v, c in enumerate(labels.tolist())))
    print(f"{len(assignment.communities)} communities; wrote {args.out}")
    return 0


def cmd_sweep(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    spec = preset(args.experiment, args.trials, args.seed, algorithm=args.algorithm, delta=args.delta,
                  walk_c=args.max_walk_c, alpha=args.alpha, cost=not args.no_cost, out=args.out)
    rows = run_sweep(spec, jobs=max(1, args.jobs))
    _write(args.out, rows_to_csv(rows))
    failed = sum(r["status"] != "ok" for r in rows if r["kind"] == "trial")
    print(f"{len(spec.cells)} cells x {spec.trials} trials, {failed} failed; wrote {args.out}")
    return 0


def cmd_cost(args) -> int:
    if any(k < 2 for k in args.k):
        raise UsageError("--k values must be at least 2")
    g, truth = _load(args)
    delta = _delta(args, g, truth)
    cfg = CdrwConfig(delta=delta, walk_c=args.max_walk_c, seed=args.seed)
    s = args.source if args.source is not None else int(np.random.default_rng(args.seed).integers(g.n))
    if not 0 <= s < g.n:
        raise DataError("--source out of range")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        run = simulate_cdrw(g, s, cfg)
    ledger = run.ledger
    pp = _params(args, g, truth)
    meta = {"seed": args.seed, "source": s, "delta": delta, "community_size": int(run.members.size)}
    if pp is not None:
        meta.update(r=pp.r, p=pp.p, q=pp.q)
    report = {"congest": ledger.to_dict(**meta), "kmachine": []}
    dmax = int(g.degrees.max()) if g.n else 0
    for k in args.k:
        est = conversion_estimate(ledger.messages, ledger.rounds, dmax, k, args.bandwidth,
                                  *((g.n, pp.r, pp.p, pp.q) if pp is not None else ()))
        cross = cross_machine_messages(g, rvp_partition(g, k, args.seed), ledger)
        entry = est.to_dict()
        entry.update(cross_machine_messages=cross,
                     cross_fraction=cross / ledger.messages if ledger.messages else 0.0)
        report["kmachine"].append(entry)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "sweep": cmd_sweep, "cost": cmd_cost}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cdrw: usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"cdrw: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"cdrw: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
