"""Command line interface: ``tiestrength <subcommand> ...``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .config import ConfigError, load_config
from .datasets import RAW_FORMATS, read_raw
from .graph import GraphError, build_graph, build_tie_graph
from .io import (
    InputError, load_graph, load_snapshots, read_labels, read_predictions, read_split,
    write_csv, write_edge_list, write_json, write_labels, write_predictions, write_split,
)
from .labeling import DEFINITIONS, DefinitionId, ThresholdConfig, assign_labels, label_all_definitions, label_definition
from .metrics import evaluate
from .splits import SplitError, balanced_hub_split, node_centric_split, random_split, unsupervised_split
from .stc import enumerate_wedges, stc_greedy, verify_stc

log = logging.getLogger("tiestrength")


def _graph_args(p):
    p.add_argument("--edges", required=True, help="edge list CSV (src,dst,weight[,week])")
    p.add_argument("--node-features", help="node feature CSV (node,f0,...)")
    p.add_argument("--edge-features", help="edge feature CSV (src,dst,f0,...)")


def _load_tg(args):
    g, report = load_graph(args.edges, args.node_features, args.edge_features)
    return build_tie_graph(g), report


def _out(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _thresholds(args) -> ThresholdConfig:
    return ThresholdConfig(
        global_candidates=tuple(args.global_candidates) if args.global_candidates else None,
        local_candidates=tuple(args.local_candidates) if args.local_candidates else None,
    )


def cmd_ingest(args) -> int:
    out = _out(args)
    if args.format == "csv":
        g, report = load_graph(args.input, args.node_features, args.edge_features)
    else:
        g, report = build_graph(read_raw(args.input, args.format))
    write_edge_list(out / "edges.csv", g)
    tg = build_tie_graph(g)
    write_json(out / "ingest_report.json", {
        "nodes": report.n_nodes, "edges": report.n_edges, "records": report.n_records,
        "merged_duplicates": report.merged_duplicates, "ties": tg.n_ties,
        "bidirectional_ties": int(tg.bidirectional.sum()), "source": str(args.input),
        "format": args.format,
    })
    print(f"{report.n_nodes} nodes, {report.n_edges} edges, {tg.n_ties} ties "
          f"({report.merged_duplicates} merged duplicates)")
    return 0


def cmd_label(args) -> int:
    tg, _ = _load_tg(args)
    out = _out(args)
    if args.all:
        sets = label_all_definitions(tg, _thresholds(args))
    else:
        d = DefinitionId.parse(args.definition)
        if (d.uses_global and args.theta_global is not None) or (d.uses_local and args.theta_local is not None):
            sets = {d: assign_labels(tg, d, args.theta_global, args.theta_local)}
        else:
            sets = {d: label_definition(tg, d, _thresholds(args))}
    for d, ls in sets.items():
        write_labels(out / f"labels_{d.value}.csv", ls)
        ms, mw = analysis.class_weight_means(ls)
        write_json(out / f"labels_{d.value}.json", {
            "definition": d.value, "theta_global": ls.theta_global, "theta_local": ls.theta_local,
            "strong_ratio": analysis.strong_ratio(ls), "n_strong": ls.n_strong, "n_weak": ls.n_weak,
            "mean_strong_weight": ms, "mean_weak_weight": mw,
        })
        print(f"{d.value}: strong ratio {analysis.strong_ratio(ls):.4f}")
    return 0


def cmd_stc(args) -> int:
    tg, _ = _load_tg(args)
    out = _out(args)
    wedges = enumerate_wedges(tg)
    ls = stc_greedy(tg, wedges)
    write_labels(out / "labels_STC.csv", ls)
    write_json(out / "labels_STC.json", {
        "definition": "STC", "n_wedges": len(wedges), "n_weak": ls.n_weak, "n_strong": ls.n_strong,
        "violations": verify_stc(tg, ls, wedges), "strong_ratio": analysis.strong_ratio(ls),
    })
    print(f"{len(wedges)} open wedges, {ls.n_weak} weak ties, {verify_stc(tg, ls, wedges)} violations")
    return 0


def cmd_split(args) -> int:
    tg, _ = _load_tg(args)
    seed = args.seed if args.seed is not None else 1
    if args.mode == "random":
        split = random_split(tg, args.n_train, seed)
    elif args.mode == "node_centric":
        split = node_centric_split(tg, args.n_hubs, seed)
    elif args.mode == "balanced_hub":
        if not args.labels:
            raise InputError("balanced_hub mode needs --labels")
        split = balanced_hub_split(tg, read_labels(args.labels, tg), args.n_hubs, seed)
    else:
        split = unsupervised_split(tg)
    write_split(_out(args) / "split.csv", tg, split)
    print(f"train {len(split.train)}, val {len(split.val)}, test {len(split.test)}")
    return 0


def _matrix_rows(m):
    return [[a, *m.values[i].tolist()] for i, a in enumerate(m.names)]


def cmd_analyze(args) -> int:
    out = _out(args)
    if args.mode in ("distribution", "correlation"):
        tg, _ = _load_tg(args)
        if args.labels:
            canon = [d.value for d in DEFINITIONS]
            loaded = [read_labels(path, tg) for path in args.labels]
            loaded.sort(key=lambda ls: (canon.index(ls.name) if ls.name in canon else len(canon), ls.name))
            sets = {ls.definition: ls for ls in loaded}
        else:
            sets = label_all_definitions(tg, _thresholds(args))
        if args.mode == "distribution":
            rows = analysis.distribution_table(sets)
            cols = list(rows[0])
            write_csv(out / "distribution.csv", cols, [[r[c] for c in cols] for r in rows])
            write_json(out / "distribution.json", rows)
        else:
            pear, eucl = analysis.definition_matrices(sets)
            for m in (pear, eucl):
                write_csv(out / f"{m.kind}.csv", ["definition", *m.names], _matrix_rows(m))
            write_csv(out / "heatmap_long.csv", ["def_a", "def_b", "value", "kind"],
                      pear.long_form() + eucl.long_form())
        return 0

    if not args.snapshots:
        raise InputError(f"{args.mode} mode needs --snapshots")
    series = load_snapshots(args.snapshots)
    if len(series) < 2:
        raise InputError(f"{args.mode} mode needs at least 2 snapshots, manifest has {len(series)}")
    t0 = args.t0 if args.t0 is not None else series.weeks[0]
    deltas = args.delta_t or [w - t0 for w in series.weeks if w > t0]
    tg0 = series.tie_graph_at(t0)
    defs = [DefinitionId.parse(d) for d in (args.definitions or [d.value for d in DEFINITIONS])]
    labels0 = {d: label_definition(tg0, d, _thresholds(args)) for d in defs}
    if args.mode == "resilience":
        rep = analysis.dissolution_study(tg0, labels0, series, t0, deltas)
        doc = rep.to_dict()
        write_json(out / "resilience.json", doc)
        cols = ["definition", "delta_t", "strong_rate", "weak_rate", "n_strong", "n_weak", "ratio"]
        write_csv(out / "resilience.csv", cols, [[r[c] for c in cols] for r in doc["rows"]])
        print(f"R = {rep.R:.4f}")
        return 0
    if not args.predictions:
        raise InputError("future mode needs --predictions (made on the t0 snapshot)")
    pred = read_predictions(args.predictions, tg0)
    rows = []
    for d in defs:
        future = {dt: analysis.relabel_future(series.tie_graph_at(t0 + dt), labels0[d],
                                              reselect=not args.frozen_thresholds,
                                              config=_thresholds(args))
                  for dt in [0, *deltas]}
        for pt in analysis.future_label_evaluation(pred, tg0, future):
            rows.append([d.value, pt.delta_t, pt.accuracy, pt.n_surviving])
    write_csv(out / "future.csv", ["definition", "delta_t", "accuracy", "n_surviving"], rows)
    return 0


def cmd_evaluate(args) -> int:
    tg, _ = _load_tg(args)
    labels = read_labels(args.labels, tg)
    pred = read_predictions(args.predictions, tg)
    idx = read_split(args.split, tg).test if args.split else np.arange(tg.n_ties)
    res = evaluate(pred, labels.strong, tg, idx)
    doc = {**res.to_dict(), "labels": str(args.labels), "predictions": str(args.predictions),
           "definition": labels.name, "split": str(args.split) if args.split else None}
    write_json(_out(args) / "evaluation.json", doc)
    print(f"accuracy {res.accuracy:.4f}, macro-F1 {res.macro_f1:.4f}, "
          f"avg weight diff {res.avg_weight_diff:.4f}")
    return 0


def cmd_predict(args) -> int:
    from .learners import predict_ties

    tg, _ = _load_tg(args)
    labels = read_labels(args.labels, tg)
    split = read_split(args.split, tg)
    pred = predict_ties(args.model, tg, labels, split, seed=args.seed or 0)
    write_predictions(_out(args) / f"predictions_{args.model}.csv", tg, pred)
    return 0


def cmd_run(args) -> int:
    from .runner import run_experiment

    if not args.config:
        raise ConfigError("run needs --config")
    overrides = {"jobs": args.jobs}
    if args.output_dir != ".":
        overrides["output_dir"] = Path(args.output_dir)
    if args.seed is not None:
        overrides["seeds"] = (args.seed,)
    cfg = load_config(args.config, **overrides)
    records, ok = run_experiment(cfg)
    failed = sum(r["status"] != "ok" for r in records)
    print(f"{len(records)} cells, {failed} failed; reports in {cfg.output_dir}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None)
    common.add_argument("--output-dir", default=".")
    common.add_argument("--config")
    common.add_argument("-v", "--verbose", action="store_true")

    thr = argparse.ArgumentParser(add_help=False)
    thr.add_argument("--global-candidates", type=float, nargs="+")
    thr.add_argument("--local-candidates", type=int, nargs="+")

    parser = argparse.ArgumentParser(prog="tiestrength", parents=[common],
                                     description="Tie strength labeling, analysis and benchmarking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="validate and canonicalize an edge list")
    p.add_argument("input")
    p.add_argument("--format", choices=RAW_FORMATS, default="csv")
    p.add_argument("--node-features")
    p.add_argument("--edge-features")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("label", parents=[common, thr], help="pseudo ground-truth labels")
    _graph_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--def", dest="definition")
    g.add_argument("--all", action="store_true")
    p.add_argument("--theta-global", type=float)
    p.add_argument("--theta-local", type=int)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("stc", parents=[common], help="STC greedy labeling")
    _graph_args(p)
    p.set_defaults(func=cmd_stc)

    p = sub.add_parser("split", parents=[common], help="train/val/test tie split")
    _graph_args(p)
    p.add_argument("--mode", choices=("random", "node_centric", "balanced_hub", "unsupervised"), default="random")
    p.add_argument("--n-train", type=int, default=20)
    p.add_argument("--n-hubs", type=int, default=5)
    p.add_argument("--labels")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("analyze", parents=[common, thr], help="definition diagnostics")
    p.add_argument("--mode", choices=("distribution", "correlation", "resilience", "future"), required=True)
    p.add_argument("--edges")
    p.add_argument("--node-features")
    p.add_argument("--edge-features")
    p.add_argument("--labels", nargs="+")
    p.add_argument("--snapshots")
    p.add_argument("--t0", type=int)
    p.add_argument("--delta-t", type=int, nargs="+")
    p.add_argument("--definitions", nargs="+")
    p.add_argument("--predictions")
    p.add_argument("--frozen-thresholds", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("evaluate", parents=[common], help="score predictions against labels")
    _graph_args(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--split")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", parents=[common], help="train one model on a split and predict every tie")
    _graph_args(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("run", parents=[common], help="run an experiment grid from --config")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "analyze" and args.mode in ("distribution", "correlation") and not args.edges:
        print(f"error: --edges is required for --mode {args.mode}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (InputError, GraphError, ConfigError, SplitError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
