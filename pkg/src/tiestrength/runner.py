"""Experiment grid runner: split, train, evaluate, aggregate over seeds."""
from __future__ import annotations

import logging
import time
import traceback
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path

from .config import ExperimentConfig
from .datasets import DatasetManifest, read_manifest
from .graph import build_tie_graph
from .io import write_csv, write_json
from .labeling import DefinitionId, label_definition
from .learners import predict_ties
from .metrics import EvalResult, aggregate, evaluate
from .splits import balanced_hub_split, node_centric_split, random_split, unsupervised_split
from .stc import stc_greedy

log = logging.getLogger(__name__)

RESULT_COLUMNS = ["dataset", "setting", "definition", "model", "seed", "accuracy", "macro_f1", "avg_weight_diff"]


@lru_cache(maxsize=8)
def _dataset(path: str) -> tuple[DatasetManifest, object]:
    manifest = read_manifest(path)
    g, _ = manifest.load()
    return manifest, build_tie_graph(g)


@lru_cache(maxsize=64)
def _labels(path: str, definition: DefinitionId, thresholds):
    _, tg = _dataset(path)
    return label_definition(tg, definition, thresholds)


@lru_cache(maxsize=8)
def _stc(path: str):
    return stc_greedy(_dataset(path)[1]).strong


def make_split(setting: str, tg, manifest: DatasetManifest, labels, seed: int):
    if setting == "random":
        return random_split(tg, manifest.n_train, seed)
    if setting == "node_centric":
        return node_centric_split(tg, manifest.n_hubs, seed)
    if setting == "balanced_hub":
        return balanced_hub_split(tg, labels, manifest.n_hubs, seed)
    if setting == "unsupervised":
        return unsupervised_split(tg)
    raise ValueError(f"unknown setting {setting!r}")


def cell_path(out: Path, dataset: str, setting: str, definition: str, model: str, seed: int) -> Path:
    return out / "cells" / dataset / setting / definition / model / f"seed{seed}.json"


def run_cell(cfg: ExperimentConfig, ds_path, setting: str, definition: DefinitionId, model: str, seed: int) -> dict:
    started = time.perf_counter()
    record = {"setting": setting, "definition": definition.value, "model": model, "seed": seed}
    try:
        manifest, tg = _dataset(str(ds_path))
        record["dataset"] = manifest.name
        labels = _labels(str(ds_path), definition, cfg.thresholds)
        split = make_split(setting, tg, manifest, labels, seed)
        if model == "stc_greedy":
            pred = _stc(str(ds_path))
        else:
            pred = predict_ties(model, tg, labels, split, seed=seed, forest=cfg.forest, neural=cfg.neural)
        res = evaluate(pred, labels.strong, tg, split.test)
        record.update(
            status="ok",
            result=res.to_dict(),
            split={"train": len(split.train), "val": len(split.val), "test": len(split.test)},
            thresholds={"theta_global": labels.theta_global, "theta_local": labels.theta_local},
        )
    except Exception as exc:  # one failing cell must not stop the grid
        record.setdefault("dataset", Path(ds_path).stem)
        record.update(status="error", error=f"{type(exc).__name__}: {exc}",
                      traceback=traceback.format_exc())
    record["runtime_s"] = time.perf_counter() - started
    write_json(cell_path(cfg.output_dir, record["dataset"], setting, definition.value, model, seed), record)
    return record


def _run_star(args):
    return run_cell(*args)


def run_experiment(cfg: ExperimentConfig) -> tuple[list[dict], bool]:
    """Run every grid cell; returns the cell records and whether all succeeded."""
    tasks = [(cfg, ds, s, d, m, seed) for ds, s, d, m, seed in cfg.cells()]
    log.info("running %d cells with %d job(s)", len(tasks), cfg.jobs)
    if cfg.jobs == 1:
        records = [run_cell(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_run_star, tasks))
    ok = all(r["status"] == "ok" for r in records)
    write_reports(cfg.output_dir, records)
    return records, ok


def write_reports(out: Path, records: list[dict]) -> None:
    rows = []
    groups = defaultdict(list)
    for r in records:
        if r["status"] != "ok":
            continue
        res = r["result"]
        rows.append([r["dataset"], r["setting"], r["definition"], r["model"], r["seed"],
                     res["accuracy"], res["macro_f1"], res["avg_weight_diff"]])
        groups[(r["dataset"], r["setting"], r["definition"], r["model"])].append(r)
    write_csv(out / "results.csv", RESULT_COLUMNS, rows)

    agg_rows = []
    for key, rs in groups.items():
        results = [EvalResult(**{**x["result"], "confusion": tuple(map(tuple, x["result"]["confusion"])),
                                 "seeds": ()}) for x in rs]
        seeds = [x["seed"] for x in rs]
        a = aggregate(results, seeds)
        agg_rows.append([*key, "mean(" + ";".join(map(str, seeds)) + ")",
                         a.accuracy, a.macro_f1, a.avg_weight_diff])
    write_csv(out / "aggregate.csv", RESULT_COLUMNS, agg_rows)
    failures = [{k: r[k] for k in ("dataset", "setting", "definition", "model", "seed", "error")}
                for r in records if r["status"] != "ok"]
    write_json(out / "failures.json", failures)
