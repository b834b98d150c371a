"""Directed weighted graphs, their undirected tie projection, and structural primitives."""
from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse

NO_WEEK = -1


class GraphError(ValueError):
    """Invalid graph input. ``record`` is the offending input row when known."""

    def __init__(self, message: str, record: int | None = None):
        if record is not None:
            message = f"record {record}: {message}"
        super().__init__(message)
        self.record = record


def _sorted_ids(ids: Iterable) -> list:
    ids = set(ids)
    try:
        return sorted(ids)
    except TypeError:
        return sorted(ids, key=lambda x: (type(x).__name__, str(x)))


@dataclass(frozen=True)
class IngestReport:
    n_nodes: int
    n_edges: int
    n_records: int
    merged_duplicates: int


@dataclass(frozen=True, eq=False)
class DirectedWeightedGraph:
    """Immutable directed weighted graph on dense node ids ``0..n-1``.

    Edges are stored sorted by ``(src, dst)``; ``week`` holds ``NO_WEEK`` for
    edges without a timestamp and is ``None`` when no record carried one.
    ``node_ids[i]`` is the original identifier of dense node ``i``.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    node_ids: tuple
    week: np.ndarray | None = None
    node_features: np.ndarray | None = None
    edge_features: np.ndarray | None = None

    @property
    def m(self) -> int:
        return len(self.src)

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n)

    @cached_property
    def _out_ptr(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.out_degree)])

    @cached_property
    def _edge_pos(self) -> dict:
        return {(int(s), int(d)): e for e, (s, d) in enumerate(zip(self.src, self.dst))}

    def has_node(self, node: int) -> bool:
        return 0 <= node < self.n

    def _check_node(self, node: int) -> None:
        if not isinstance(node, (int, np.integer)) or not self.has_node(int(node)):
            raise GraphError(f"unknown node id {node!r}")

    def out_weights(self, node: int) -> np.ndarray:
        self._check_node(node)
        return self.weight[self._out_ptr[node]:self._out_ptr[node + 1]]

    def edge_weight(self, src: int, dst: int) -> float:
        """Weight of ``src -> dst``, 0.0 when the edge is absent."""
        e = self._edge_pos.get((int(src), int(dst)))
        return 0.0 if e is None else float(self.weight[e])

    def adjacency(self) -> sparse.csr_matrix:
        return sparse.csr_matrix(
            (np.ones(self.m), (self.src, self.dst)), shape=(self.n, self.n)
        )

    def weight_matrix(self) -> sparse.csr_matrix:
        return sparse.csr_matrix((self.weight, (self.src, self.dst)), shape=(self.n, self.n))

    def dense_id(self, original) -> int:
        try:
            return self._id_lookup[original]
        except KeyError:
            raise GraphError(f"unknown node id {original!r}") from None

    @cached_property
    def _id_lookup(self) -> dict:
        return {x: i for i, x in enumerate(self.node_ids)}


def build_graph(
    edge_records: Iterable[Sequence],
    node_features: Mapping | np.ndarray | None = None,
    edge_features: Sequence | np.ndarray | None = None,
    node_ids: Iterable | None = None,
) -> tuple[DirectedWeightedGraph, IngestReport]:
    """Ingest ``(src, dst, weight[, week])`` records into a deduplicated graph.

    Parallel records for the same ordered pair are merged: weights summed,
    edge-feature rows averaged, earliest week kept. Node ids are densified in
    sorted order of the original identifiers; ``node_ids`` may widen the id
    universe (e.g. to share it across snapshots). ``node_features`` is either
    a mapping from original id to vector (missing nodes get zero rows) or an
    array aligned with the sorted ids. ``edge_features`` rows align with
    ``edge_records``.
    """
    records = list(edge_records)
    if edge_features is not None:
        edge_features = np.asarray(edge_features, dtype=float)
        if edge_features.ndim != 2 or edge_features.shape[0] != len(records):
            raise GraphError(
                f"edge feature rows ({edge_features.shape[0] if edge_features.ndim else 0}) "
                f"do not match edge records ({len(records)})"
            )

    merged: dict[tuple, list] = {}
    any_week = False
    for i, rec in enumerate(records):
        if len(rec) not in (3, 4):
            raise GraphError(f"expected 3 or 4 fields, got {len(rec)}", i)
        s, d, w = rec[0], rec[1], rec[2]
        week = rec[3] if len(rec) == 4 else None
        if s == d:
            raise GraphError(f"self-loop at node {s!r}", i)
        try:
            w = float(w)
        except (TypeError, ValueError):
            raise GraphError(f"weight {w!r} is not a number", i) from None
        if not (w > 0 and math.isfinite(w)):
            raise GraphError(f"weight must be positive and finite, got {w!r}", i)
        if week is not None:
            any_week = True
            week = int(week)
        feat = edge_features[i] if edge_features is not None else None
        slot = merged.get((s, d))
        if slot is None:
            merged[(s, d)] = [w, None if feat is None else feat.copy(), 1, week]
        else:
            slot[0] += w
            if feat is not None:
                slot[1] += feat
            slot[2] += 1
            if week is not None and (slot[3] is None or week < slot[3]):
                slot[3] = week

    universe = {x for pair in merged for x in pair}
    if node_ids is not None:
        universe.update(node_ids)
    if isinstance(node_features, Mapping):
        universe.update(node_features)
    ids = _sorted_ids(universe)
    lookup = {x: i for i, x in enumerate(ids)}
    n = len(ids)

    X = None
    if node_features is not None:
        if isinstance(node_features, Mapping):
            rows = {lookup[k]: np.asarray(v, dtype=float) for k, v in node_features.items()}
            dims = {r.shape for r in rows.values()}
            if len(dims) > 1:
                raise GraphError(f"node feature rows have inconsistent shapes {sorted(dims)}")
            dim = dims.pop()[0] if dims else 0
            X = np.zeros((n, dim))
            for r, vec in rows.items():
                X[r] = vec
        else:
            X = np.asarray(node_features, dtype=float)
            if X.ndim != 2 or X.shape[0] != n:
                raise GraphError(f"node feature rows ({X.shape[0]}) do not match node count ({n})")

    keys = sorted(merged, key=lambda p: (lookup[p[0]], lookup[p[1]]))
    src = np.array([lookup[k[0]] for k in keys], dtype=np.int64)
    dst = np.array([lookup[k[1]] for k in keys], dtype=np.int64)
    weight = np.array([merged[k][0] for k in keys], dtype=float)
    week = None
    if any_week:
        week = np.array(
            [NO_WEEK if merged[k][3] is None else merged[k][3] for k in keys], dtype=np.int64
        )
    E = None
    if edge_features is not None:
        E = np.array([merged[k][1] / merged[k][2] for k in keys]).reshape(
            len(keys), edge_features.shape[1]
        )

    g = DirectedWeightedGraph(
        n=n, src=src, dst=dst, weight=weight, node_ids=tuple(ids), week=week,
        node_features=X, edge_features=E,
    )
    report = IngestReport(
        n_nodes=n, n_edges=g.m, n_records=len(records),
        merged_duplicates=len(records) - g.m,
    )
    return g, report


@dataclass(frozen=True, eq=False)
class TieGraph:
    """Undirected ties over a directed graph, one per connected unordered pair.

    Ties are ordered lexicographically by canonical pair ``(u, v)`` with
    ``u < v``; ``w_fwd`` is the weight of ``u -> v`` and ``w_bwd`` of
    ``v -> u`` (0 when absent).
    """

    graph: DirectedWeightedGraph
    u: np.ndarray
    v: np.ndarray
    w_fwd: np.ndarray
    w_bwd: np.ndarray
    features: np.ndarray

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def n_ties(self) -> int:
        return len(self.u)

    def __len__(self) -> int:
        return len(self.u)

    @cached_property
    def bidirectional(self) -> np.ndarray:
        return (self.w_fwd > 0) & (self.w_bwd > 0)

    @cached_property
    def tie_weight(self) -> np.ndarray:
        return self.w_fwd + self.w_bwd

    @cached_property
    def _pos(self) -> dict:
        return {(int(a), int(b)): t for t, (a, b) in enumerate(zip(self.u, self.v))}

    def index(self, a: int, b: int) -> int:
        key = (int(a), int(b)) if a < b else (int(b), int(a))
        try:
            return self._pos[key]
        except KeyError:
            raise KeyError(f"no tie between {a} and {b}") from None

    def has_tie(self, a: int, b: int) -> bool:
        key = (int(a), int(b)) if a < b else (int(b), int(a))
        return key in self._pos

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.u.tolist(), self.v.tolist()))

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric binary tie adjacency."""
        rows = np.concatenate([self.u, self.v])
        cols = np.concatenate([self.v, self.u])
        return sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def degree(self) -> np.ndarray:
        return np.bincount(np.concatenate([self.u, self.v]), minlength=self.n)

    def neighbors(self, node: int) -> np.ndarray:
        self.graph._check_node(node)
        A = self.adjacency
        return A.indices[A.indptr[node]:A.indptr[node + 1]]

    @cached_property
    def incidence(self) -> sparse.csr_matrix:
        """Node-by-tie incidence matrix."""
        k = self.n_ties
        rows = np.concatenate([self.u, self.v])
        cols = np.concatenate([np.arange(k), np.arange(k)])
        return sparse.csr_matrix((np.ones(2 * k), (rows, cols)), shape=(self.n, k))


def build_tie_graph(g: DirectedWeightedGraph) -> TieGraph:
    a = np.minimum(g.src, g.dst)
    b = np.maximum(g.src, g.dst)
    keys, tie_of_edge = np.unique(a * g.n + b, return_inverse=True)
    k = len(keys)
    u, v = keys // g.n, keys % g.n
    forward = g.src < g.dst
    w_fwd = np.zeros(k)
    w_bwd = np.zeros(k)
    w_fwd[tie_of_edge[forward]] = g.weight[forward]
    w_bwd[tie_of_edge[~forward]] = g.weight[~forward]

    if g.edge_features is not None:
        counts = np.bincount(tie_of_edge, minlength=k).astype(float)
        feats = np.zeros((k, g.edge_features.shape[1]))
        np.add.at(feats, tie_of_edge, g.edge_features)
        feats /= counts[:, None]
    else:
        feats = (w_fwd + w_bwd)[:, None]
    return TieGraph(graph=g, u=u, v=v, w_fwd=w_fwd, w_bwd=w_bwd, features=feats)


def kth_largest_out_weight(g: DirectedWeightedGraph, node: int, theta: int) -> float:
    """The ``theta``-th largest outgoing weight of ``node``.

    Clamps to the smallest outgoing weight when the out-degree is below
    ``theta``; returns ``inf`` for nodes without outgoing edges.
    """
    if theta < 1:
        raise ValueError(f"theta must be >= 1, got {theta}")
    w = g.out_weights(node)
    if len(w) == 0:
        return math.inf
    w = np.sort(w)[::-1]
    return float(w[min(theta, len(w)) - 1])


def local_thresholds(g: DirectedWeightedGraph, theta: int) -> np.ndarray:
    """Vectorized :func:`kth_largest_out_weight` over every node."""
    if theta < 1:
        raise ValueError(f"theta must be >= 1, got {theta}")
    out = np.full(g.n, math.inf)
    if g.m == 0:
        return out
    order = np.lexsort((-g.weight, g.src))
    ptr = g._out_ptr
    has = g.out_degree > 0
    nodes = np.flatnonzero(has)
    rank = np.minimum(theta, g.out_degree[nodes]) - 1
    out[nodes] = g.weight[order[ptr[nodes] + rank]]
    return out


def clustering_coefficients(tg: TieGraph) -> np.ndarray:
    A = tg.adjacency
    tri = np.asarray((A @ A).multiply(A).sum(axis=1)).ravel() / 2
    k = tg.degree.astype(float)
    denom = k * (k - 1)
    out = np.zeros(tg.n)
    mask = k >= 2
    out[mask] = 2 * tri[mask] / denom[mask]
    return out


def clustering_coefficient(tg: TieGraph, node: int) -> float:
    tg.graph._check_node(node)
    nbrs = tg.neighbors(node)
    k = len(nbrs)
    if k < 2:
        return 0.0
    A = tg.adjacency
    links = A[nbrs][:, nbrs].sum() / 2
    return float(2 * links / (k * (k - 1)))


def dissolved_ties(t0: TieGraph, t1: TieGraph) -> set[tuple[int, int]]:
    """Ties of ``t0`` with no directed edge in either direction in ``t1``.

    Pairs are reported in ``t0``'s dense ids; graphs over different id maps
    are matched through the original identifiers.
    """
    same = t0.graph.node_ids == t1.graph.node_ids
    out = set()
    for a, b in t0.pairs():
        if same:
            alive = t1.has_tie(a, b)
        else:
            lookup = t1.graph._id_lookup
            oa, ob = t0.graph.node_ids[a], t0.graph.node_ids[b]
            alive = oa in lookup and ob in lookup and t1.has_tie(lookup[oa], lookup[ob])
        if not alive:
            out.add((a, b))
    return out


@dataclass(frozen=True, eq=False)
class SnapshotSeries:
    """Weekly graph snapshots over a shared node id space."""

    weeks: tuple[int, ...]
    graphs: tuple[DirectedWeightedGraph, ...]

    def __post_init__(self):
        if len(self.weeks) != len(self.graphs):
            raise GraphError("weeks and graphs differ in length")
        if any(b <= a for a, b in zip(self.weeks, self.weeks[1:])):
            raise GraphError(f"week indices must be strictly increasing: {self.weeks}")
        if any(g.node_ids != self.graphs[0].node_ids for g in self.graphs[1:]):
            raise GraphError("snapshots do not share a node id space")

    def __len__(self) -> int:
        return len(self.weeks)

    def at(self, week: int) -> DirectedWeightedGraph:
        try:
            return self.graphs[self.weeks.index(week)]
        except ValueError:
            raise KeyError(f"no snapshot for week {week}") from None

    @cached_property
    def tie_graphs(self) -> tuple[TieGraph, ...]:
        return tuple(build_tie_graph(g) for g in self.graphs)

    def tie_graph_at(self, week: int) -> TieGraph:
        if week not in self.weeks:
            raise KeyError(f"no snapshot for week {week}")
        return self.tie_graphs[self.weeks.index(week)]


def build_snapshot_series(records_by_week: Mapping[int, Iterable[Sequence]]) -> SnapshotSeries:
    weeks = sorted(records_by_week)
    recs = {w: list(records_by_week[w]) for w in weeks}
    universe = _sorted_ids({x for rs in recs.values() for r in rs for x in r[:2]})
    graphs = tuple(build_graph(recs[w], node_ids=universe)[0] for w in weeks)
    return SnapshotSeries(weeks=tuple(weeks), graphs=graphs)
