"""Raw public dataset readers and the dataset manifest.

Supported raw formats (as distributed by SNAP):

* ``bitcoin-alpha``: ``soc-sign-bitcoinalpha.csv[.gz]``, rows
  ``SOURCE,TARGET,RATING,TIME``. Distrust ratings (<= 0) are dropped and the
  rating becomes the edge weight.
* ``college-msg``: ``CollegeMsg.txt[.gz]``, rows ``SRC DST UNIXTS``. Each
  message adds 1 to the weight of its directed edge.

Timestamps become week indices counted from the earliest record.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .graph import DirectedWeightedGraph, IngestReport, build_graph
from .io import InputError, _open_text, load_graph, load_snapshots, read_toml

WEEK = 7 * 24 * 3600
RAW_FORMATS = ("csv", "bitcoin-alpha", "college-msg")


def _weeks(times):
    t0 = min(times) if times else 0
    return [(t - t0) // WEEK for t in times]


def read_bitcoin_alpha(path) -> list[tuple]:
    rows = []
    with _open_text(path) as fh:
        for line, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            parts = raw.split(",")
            if len(parts) != 4:
                raise InputError(f"{path}:{line}: expected SOURCE,TARGET,RATING,TIME")
            try:
                s, d, r, t = int(parts[0]), int(parts[1]), float(parts[2]), int(float(parts[3]))
            except ValueError:
                raise InputError(f"{path}:{line}: malformed row {raw!r}") from None
            if r > 0 and s != d:
                rows.append((s, d, r, t))
    weeks = _weeks([r[3] for r in rows])
    return [(s, d, r, w) for (s, d, r, _), w in zip(rows, weeks)]


def read_college_msg(path) -> list[tuple]:
    rows = []
    with _open_text(path) as fh:
        for line, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise InputError(f"{path}:{line}: expected SRC DST UNIXTS")
            try:
                s, d, t = int(parts[0]), int(parts[1]), int(parts[2])
            except ValueError:
                raise InputError(f"{path}:{line}: malformed row {raw.strip()!r}") from None
            if s != d:
                rows.append((s, d, 1.0, t))
    weeks = _weeks([r[3] for r in rows])
    return [(s, d, 1.0, w) for (s, d, _, _), w in zip(rows, weeks)]


def read_raw(path, fmt: str) -> list[tuple]:
    if fmt == "bitcoin-alpha":
        return read_bitcoin_alpha(path)
    if fmt == "college-msg":
        return read_college_msg(path)
    raise ValueError(f"unknown raw format {fmt!r}; expected one of {RAW_FORMATS[1:]}")


@dataclass(frozen=True)
class DatasetManifest:
    """Dataset description: files plus per-dataset split budgets."""

    name: str
    edges: Path
    fmt: str = "csv"
    node_features: Path | None = None
    edge_features: Path | None = None
    snapshots: Path | None = None
    n_train: int = 20
    n_hubs: int = 5
    extra: dict = field(default_factory=dict)

    def load(self) -> tuple[DirectedWeightedGraph, IngestReport]:
        if self.fmt == "csv":
            return load_graph(self.edges, self.node_features, self.edge_features)
        if self.node_features or self.edge_features:
            raise InputError(f"{self.name}: feature tables need the csv edge format")
        return build_graph(read_raw(self.edges, self.fmt))

    def load_snapshots(self):
        if self.snapshots is None:
            raise InputError(f"{self.name}: no snapshot manifest")
        return load_snapshots(self.snapshots)


def read_manifest(path) -> DatasetManifest:
    doc = read_toml(path)
    base = Path(path).parent
    if doc.get("schema", "v1") != "v1":
        raise InputError(f"{path}: unsupported schema {doc.get('schema')!r}")
    if "edges" not in doc:
        raise InputError(f"{path}: missing 'edges'")

    def p(key):
        return base / doc[key] if doc.get(key) else None

    fmt = doc.get("format", "csv")
    if fmt not in RAW_FORMATS:
        raise InputError(f"{path}: unknown format {fmt!r}")
    known = {"schema", "name", "edges", "format", "node_features", "edge_features",
             "snapshots", "n_train", "n_hubs"}
    return DatasetManifest(
        name=doc.get("name", Path(path).stem),
        edges=base / doc["edges"],
        fmt=fmt,
        node_features=p("node_features"),
        edge_features=p("edge_features"),
        snapshots=p("snapshots"),
        n_train=int(doc.get("n_train", 20)),
        n_hubs=int(doc.get("n_hubs", 5)),
        extra={k: v for k, v in doc.items() if k not in known},
    )
