"""``paretoflow`` command line."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .consistency import DilemmaInstance, check_consistency, enumerate_dilemmas
from .metrics import compute_report
from .orders import rank_points
from .pareto import read_points_csv


def _out_stream(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_rank(args):
    pts = read_points_csv(args.points)
    ranks = rank_points(pts, args.method, max_rank=args.max_rank)
    fh = _out_stream(args.out)
    try:
        w = csv.writer(fh)
        w.writerow(["id", "score", "layer_or_distance"])
        for i, s, a in zip(ranks.ids, ranks.scores, ranks.aux):
            w.writerow([int(i), repr(float(s)), repr(float(a))])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_metrics(args):
    S = read_points_csv(args.points).points
    P = read_points_csv(args.reference).points
    rep = compute_report(S, P, ref_point=args.ref_point, z_star=args.utopian, tol=args.tol, true_front=not args.not_front)
    if args.csv:
        items = rep.metric_items()
        w = csv.writer(sys.stdout)
        if not args.no_header:
            w.writerow([k for k, _ in items])
        w.writerow(["" if v is None else repr(float(v)) for _, v in items])
    elif args.report:
        Path(args.report).write_text(json.dumps(rep.to_dict(), indent=2))
    else:
        print(json.dumps(rep.to_dict(), indent=2))
    return 0


def _load_subsets(path):
    subs = json.loads(Path(path).read_text())
    if isinstance(subs, dict):
        subs = subs["subsets"]
    return subs


def cmd_check(args):
    inst = DilemmaInstance(read_points_csv(args.points), _load_subsets(args.subsets))
    verdict = check_consistency(inst, include_full_set=args.include_full_set)
    if args.json:
        print(
            json.dumps(
                {
                    "feasible": verdict.feasible,
                    "witness": verdict.witness,
                    "contradiction": verdict.contradiction,
                    "active": verdict.active,
                },
                indent=2,
            )
        )
    else:
        print(verdict.describe())
    return 0


def cmd_enumerate(args):
    pts = read_points_csv(args.points)
    fams = enumerate_dilemmas(pts, args.subset_size, args.limit, args.max_results)
    out = [{"subsets": [list(s) for s in inst.subsets]} for inst in fams]
    text = json.dumps(out, indent=2)
    if args.out:
        Path(args.out).write_text(text)
        print(f"{len(out)} minimal infeasible families written to {args.out}")
    else:
        print(text)
    return 0


def cmd_train(args):
    from .config import load_config
    from .harness import run_experiment

    cfg = load_config(args.config)
    seeds = [args.seed] if args.seed is not None else None
    table = run_experiment(cfg, out_dir=args.out, seeds=seeds)
    for r in table.rows:
        if r["status"] == "ok":
            print(f"{r['method']:>12} seed {r['seed']}: hv={r['hv']} coverage={r['coverage']} d_h={r['d_h']}")
        else:
            print(f"{r['method']:>12} seed {r['seed']}: FAILED {r['error']}", file=sys.stderr)
    if table.errors:
        return 2
    return 0


def cmd_heatmap(args):
    from .harness import emit_rank_heatmap

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    methods = ["gr", "nn"] if args.method == "both" else [args.method]
    for m in methods:
        path = out / f"{args.reward}_{m}.csv"
        emit_rank_heatmap(args.reward, m, args.grid, path)
        print(path)
    return 0


def _run_fronts(run_dir):
    """Pool each method's generated non-dominated candidates over seeds from a run directory."""
    data = json.loads((Path(run_dir) / "results.json").read_text())
    fronts = {}
    for row in data["rows"]:
        if row["status"] != "ok":
            continue
        with open(row["artifacts"]["plot_data"], newline="") as fh:
            pts = [[float(v) for v in r[1:]] for r in csv.reader(fh) if r[0] == "candidate_front"]
        fronts.setdefault(row["method"], []).extend(pts)
    return {k: np.array(v) for k, v in fronts.items()}


def cmd_compare(args):
    from .harness import compare_fronts

    fronts = {}
    if args.run:
        fronts.update(_run_fronts(args.run))
    for spec in args.fronts or []:
        name, _, path = spec.partition("=")
        if not path:
            raise SystemExit(f"--fronts expects NAME=FILE, got {spec!r}")
        fronts[name] = read_points_csv(path).points
    if not fronts:
        raise SystemExit("nothing to compare: pass --run DIR or --fronts NAME=FILE")
    counts = compare_fronts(fronts)
    w = csv.writer(sys.stdout)
    w.writerow(["method", "non_dominated"])
    for k, v in counts.items():
        w.writerow([k, v])
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="paretoflow", description="Global-order GFlowNets for multi-objective sampling.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rank", help="score points with a global order")
    r.add_argument("--points", required=True)
    r.add_argument("--method", default="gr", choices=["gr", "gr-k", "cheap", "cheap-gr", "nn", "nn-int"])
    r.add_argument("--max-rank", type=int, default=None)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_rank)

    m = sub.add_parser("metrics", help="metric report for generated points against a reference front")
    m.add_argument("--candidates", "--points", dest="points", required=True, help="generated objective vectors (CSV)")
    m.add_argument("--reference", required=True, help="reference front (CSV)")
    m.add_argument("--ref-point", type=float, nargs="+", default=None)
    m.add_argument("--utopian", type=float, nargs="+", default=None)
    m.add_argument("--tol", type=float, default=1e-9)
    m.add_argument("--not-front", action="store_true", help="reference is not an exact front: skip coverage columns")
    m.add_argument("--report", default=None, help="write the JSON report here instead of stdout")
    m.add_argument("--csv", action="store_true", help="emit one CSV row instead of JSON")
    m.add_argument("--no-header", action="store_true")
    m.set_defaults(func=cmd_metrics)

    c = sub.add_parser("check-consistency", help="decide whether subset targets admit a joint distribution")
    c.add_argument("--points", required=True)
    c.add_argument("--subsets", required=True, help="JSON list of id lists")
    c.add_argument("--include-full-set", action="store_true")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("enumerate", help="list minimal infeasible subset families")
    e.add_argument("--points", required=True)
    e.add_argument("--subset-size", type=int, default=2)
    e.add_argument("--limit", type=int, default=3, help="largest family size searched")
    e.add_argument("--max-results", type=int, default=None)
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_enumerate)

    t = sub.add_parser("train", help="run an experiment config")
    t.add_argument("--config", required=True)
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_train)

    h = sub.add_parser("heatmap", help="global-score matrices on the unit square")
    h.add_argument("--reward", default="cossin", choices=["identity", "skew", "bump", "cossin"])
    h.add_argument("--method", default="both", choices=["gr", "nn", "both"])
    h.add_argument("--grid", type=int, default=32)
    h.add_argument("--out", default=".")
    h.set_defaults(func=cmd_heatmap)

    cp = sub.add_parser("compare", help="count each method's points on the pooled front")
    cp.add_argument("--run", default=None, help="run directory containing results.json")
    cp.add_argument("--fronts", nargs="*", help="NAME=FILE pairs")
    cp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
