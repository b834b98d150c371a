"""File formats: edge lists, feature tables, label/split/prediction CSVs, manifests."""
from __future__ import annotations

import csv
import gzip
import json
import math
import os
import sys
import tempfile
from collections.abc import Iterable, Mapping
from pathlib import Path

import numpy as np

from .graph import DirectedWeightedGraph, GraphError, IngestReport, SnapshotSeries, TieGraph, build_graph

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SCHEMA = "v1"


class InputError(ValueError):
    """Unreadable or malformed input file; the message names file and line."""


def fmt(x) -> str:
    """Fixed numeric formatting (6 significant digits) for deterministic outputs."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.6g}"
    return str(x)


def _open_text(path):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt", newline="")
    return open(path, newline="")


def parse_id(token: str):
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        return token


def _float(token, path, line, what):
    try:
        return float(token)
    except ValueError:
        raise InputError(f"{path}:{line}: {what} {token!r} is not a number") from None


def read_edge_list(path) -> list[tuple]:
    """Records from a CSV with header ``src,dst,weight[,week]``."""
    with _open_text(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError(f"{path}:1: empty file")
        header = [h.strip() for h in header]
        if header[:3] != ["src", "dst", "weight"] or header[3:] not in ([], ["week"]):
            raise InputError(f"{path}:1: expected header src,dst,weight[,week], got {','.join(header)}")
        records = []
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
            rec = [parse_id(row[0]), parse_id(row[1]), _float(row[2], path, line, "weight")]
            if len(header) == 4 and row[3].strip():
                try:
                    rec.append(int(row[3]))
                except ValueError:
                    raise InputError(f"{path}:{line}: week {row[3]!r} is not an integer") from None
            records.append(tuple(rec))
    return records


def read_node_features(path) -> dict:
    with _open_text(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "node":
            raise InputError(f"{path}:1: expected header node,f0,...")
        out = {}
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
            out[parse_id(row[0])] = [_float(x, path, line, "feature") for x in row[1:]]
    return out


def read_edge_features(path) -> dict:
    with _open_text(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or [h.strip() for h in header[:2]] != ["src", "dst"]:
            raise InputError(f"{path}:1: expected header src,dst,f0,...")
        out = {}
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
            key = (parse_id(row[0]), parse_id(row[1]))
            if key in out:
                raise InputError(f"{path}:{line}: duplicate features for edge {key}")
            out[key] = [_float(x, path, line, "feature") for x in row[2:]]
    return out


def load_graph(edges, node_features=None, edge_features=None, node_ids=None) -> tuple[DirectedWeightedGraph, IngestReport]:
    records = read_edge_list(edges)
    X = read_node_features(node_features) if node_features else None
    E = None
    if edge_features:
        table = read_edge_features(edge_features)
        rows = []
        for i, r in enumerate(records):
            if (r[0], r[1]) not in table:
                raise GraphError(f"no edge features for ({r[0]}, {r[1]})", i)
            rows.append(table[(r[0], r[1])])
        E = np.array(rows, dtype=float)
    return build_graph(records, X, E, node_ids=node_ids)


def write_edge_list(path, g: DirectedWeightedGraph) -> None:
    rows = []
    for e in range(g.m):
        row = [g.node_ids[g.src[e]], g.node_ids[g.dst[e]], fmt_exact(g.weight[e])]
        if g.week is not None:
            row.append("" if g.week[e] < 0 else int(g.week[e]))
        rows.append(row)
    header = ["src", "dst", "weight"] + (["week"] if g.week is not None else [])
    write_csv(path, header, rows)


def fmt_exact(x: float) -> str:
    """Round-trippable float, integers without a trailing ``.0``."""
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def write_csv(path, header, rows: Iterable) -> None:
    """Write via a temporary file then rename, so readers never see partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([c if isinstance(c, str) else fmt(c) for c in r])
    os.replace(tmp, path)


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(fmt(x))
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_labels(path, labels) -> None:
    tg = labels.tie_graph
    ids = tg.graph.node_ids
    rows = [
        [ids[a], ids[b], "strong" if s else "weak", labels.name,
         labels.theta_global, labels.theta_local]
        for (a, b), s in zip(tg.pairs(), labels.strong.tolist())
    ]
    write_csv(path, ["node_a", "node_b", "label", "definition", "theta_global", "theta_local"], rows)


def _tie_lookup(tg: TieGraph, path, line, a, b) -> int:
    try:
        return tg.index(tg.graph.dense_id(a), tg.graph.dense_id(b))
    except (KeyError, GraphError):
        raise InputError(f"{path}:{line}: tie ({a}, {b}) is not in the graph") from None


def read_labels(path, tg: TieGraph):
    """LabelSet from a labels CSV, aligned to ``tg``'s tie order."""
    from .labeling import STC, DefinitionId, LabelSet

    strong = np.zeros(tg.n_ties, dtype=bool)
    seen = np.zeros(tg.n_ties, dtype=bool)
    definition, tglob, tloc = None, None, None
    with _open_text(path) as fh:
        reader = csv.DictReader(fh)
        for line, row in enumerate(reader, start=2):
            t = _tie_lookup(tg, path, line, parse_id(row["node_a"]), parse_id(row["node_b"]))
            lab = row["label"].strip().lower()
            if lab not in ("strong", "weak"):
                raise InputError(f"{path}:{line}: label {row['label']!r} is not strong/weak")
            strong[t] = lab == "strong"
            seen[t] = True
            definition = row.get("definition", definition)
            tglob = row.get("theta_global") or None
            tloc = row.get("theta_local") or None
    if not seen.all():
        raise InputError(f"{path}: labels cover {int(seen.sum())} of {tg.n_ties} ties")
    d = STC if definition == STC else DefinitionId.parse(definition)
    return LabelSet(definition=d, strong=strong, tie_graph=tg,
                    theta_global=float(tglob) if tglob else None,
                    theta_local=int(float(tloc)) if tloc else None)


def write_predictions(path, tg: TieGraph, pred_strong, score_strong=None) -> None:
    ids = tg.graph.node_ids
    score = np.asarray(pred_strong, dtype=float) if score_strong is None else score_strong
    rows = [[ids[a], ids[b], "strong" if p else "weak", s]
            for (a, b), p, s in zip(tg.pairs(), np.asarray(pred_strong).tolist(), np.asarray(score).tolist())]
    write_csv(path, ["node_a", "node_b", "pred_label", "score_strong"], rows)


def read_predictions(path, tg: TieGraph) -> np.ndarray:
    pred = np.zeros(tg.n_ties, dtype=bool)
    seen = np.zeros(tg.n_ties, dtype=bool)
    with _open_text(path) as fh:
        for line, row in enumerate(csv.DictReader(fh), start=2):
            t = _tie_lookup(tg, path, line, parse_id(row["node_a"]), parse_id(row["node_b"]))
            pred[t] = row["pred_label"].strip().lower() == "strong"
            seen[t] = True
    if not seen.all():
        raise InputError(f"{path}: predictions cover {int(seen.sum())} of {tg.n_ties} ties")
    return pred


def write_split(path, tg: TieGraph, split) -> None:
    ids = tg.graph.node_ids
    part = split.partition_of()
    write_csv(path, ["node_a", "node_b", "partition"],
              [[ids[a], ids[b], part[t]] for t, (a, b) in enumerate(tg.pairs())])
    manifest = {
        "schema": SCHEMA, "mode": split.mode, "seed": split.seed, "params": split.params,
        "sizes": {"train": len(split.train), "val": len(split.val), "test": len(split.test)},
    }
    if split.hub_nodes_train is not None:
        manifest["hub_nodes_train"] = [ids[i] for i in split.hub_nodes_train]
        manifest["hub_nodes_val"] = [ids[i] for i in split.hub_nodes_val]
    write_json(Path(path).with_suffix(".json"), manifest)


def read_split(path, tg: TieGraph):
    from .splits import Split

    part = np.empty(tg.n_ties, dtype=object)
    with _open_text(path) as fh:
        for line, row in enumerate(csv.DictReader(fh), start=2):
            t = _tie_lookup(tg, path, line, parse_id(row["node_a"]), parse_id(row["node_b"]))
            if row["partition"] not in ("train", "val", "test"):
                raise InputError(f"{path}:{line}: unknown partition {row['partition']!r}")
            part[t] = row["partition"]
    if any(p is None for p in part):
        raise InputError(f"{path}: split does not cover every tie")
    meta = {}
    side = Path(path).with_suffix(".json")
    if side.exists():
        meta = json.loads(side.read_text())
    return Split(
        train=np.flatnonzero(part == "train"), val=np.flatnonzero(part == "val"),
        test=np.flatnonzero(part == "test"), mode=meta.get("mode", "random"),
        seed=meta.get("seed"), params=meta.get("params", {}),
    )


def read_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: {exc}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def load_snapshots(manifest_path) -> SnapshotSeries:
    """Snapshot series from a TOML manifest of ``[[snapshot]]`` tables with ``week`` and ``edges``."""
    from .graph import build_snapshot_series

    doc = read_toml(manifest_path)
    base = Path(manifest_path).parent
    entries = doc.get("snapshot", [])
    if not entries:
        raise InputError(f"{manifest_path}: no [[snapshot]] entries")
    recs = {}
    for e in entries:
        week = int(e["week"])
        if week in recs:
            raise InputError(f"{manifest_path}: duplicate week {week}")
        recs[week] = [r[:3] for r in read_edge_list(base / e["edges"])]
    return build_snapshot_series(recs)


def write_snapshots(directory, series_records: Mapping[int, list]) -> Path:
    """Write one edge list per week plus ``snapshots.toml``; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [f'schema = "{SCHEMA}"', ""]
    for week in sorted(series_records):
        name = f"week_{week:04d}.csv"
        write_csv(directory / name, ["src", "dst", "weight"],
                  [[r[0], r[1], fmt_exact(r[2])] for r in series_records[week]])
        lines += ["[[snapshot]]", f"week = {week}", f'edges = "{name}"', ""]
    path = directory / "snapshots.toml"
    path.write_text("\n".join(lines))
    return path
