"""Synthetic graphs for tests, sanity checks and demos."""
from __future__ import annotations

import numpy as np

from .graph import DirectedWeightedGraph, TieGraph, build_graph, build_snapshot_series, build_tie_graph
from .labeling import LabelSet


def random_records(n: int, p: float, rng: np.random.Generator, low: float = 1.0, high: float = 10.0) -> list[tuple]:
    """Erdos-Renyi style directed edges with uniform weights in ``[low, high]``."""
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    w = rng.uniform(low, high, size=len(src))
    return [(int(s), int(d), float(x)) for s, d, x in zip(src, dst, w)]


def reciprocal_records(n: int, p: float, reciprocity: float, rng: np.random.Generator,
                       low: float = 1.0, high: float = 10.0) -> list[tuple]:
    """Random undirected pairs, each returned in both directions with probability ``reciprocity``.

    Both directions of a pair share one weight, so every definition labels
    a sizeable share of ties strong.
    """
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    iu, ju = iu[keep], ju[keep]
    w = rng.uniform(low, high, size=len(iu))
    back = rng.random(len(iu)) < reciprocity
    out = []
    for a, b, x, r in zip(iu, ju, w, back):
        out.append((int(a), int(b), float(x)))
        if r:
            out.append((int(b), int(a), float(x)))
    return out


def random_graph(n: int, p: float, seed: int, low: float = 1.0, high: float = 10.0) -> DirectedWeightedGraph:
    rng = np.random.default_rng(seed)
    return build_graph(random_records(n, p, rng, low, high), node_ids=range(n))[0]


def planted_tie_graph(n_nodes: int = 60, n_ties: int = 200, n_features: int = 4, separation: float = 3.0,
                      strong_fraction: float = 0.5, seed: int = 0) -> tuple[TieGraph, LabelSet]:
    """Ties whose features come from two unit-variance Gaussians.

    Strong ties draw every coordinate with mean ``separation``, weak ties
    with mean 0, so each feature alone separates the classes by
    ``separation`` standard deviations. Every directed edge of a tie carries
    the tie's feature row, so the tie feature (the mean over its edges)
    equals the planted draw.
    """
    rng = np.random.default_rng(seed)
    pairs = set()
    while len(pairs) < n_ties:
        a, b = rng.integers(n_nodes, size=2)
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    pairs = sorted(pairs)
    strong = rng.random(n_ties) < strong_fraction
    feats = rng.normal(size=(n_ties, n_features)) + np.where(strong, separation, 0.0)[:, None]

    records, rows = [], []
    for (a, b), f in zip(pairs, feats):
        w = float(rng.integers(1, 11))
        records.append((int(a), int(b), w))
        rows.append(f)
        if rng.random() < 0.5:
            records.append((int(b), int(a), float(rng.integers(1, 11))))
            rows.append(f)
    g, _ = build_graph(records, edge_features=np.array(rows), node_ids=range(n_nodes))
    tg = build_tie_graph(g)
    order = {p: i for i, p in enumerate(pairs)}
    planted = np.array([strong[order[p]] for p in tg.pairs()])
    return tg, LabelSet("planted", planted, tg)


def dissolving_series(tg0: TieGraph, strong: np.ndarray, weak_step: float = 0.10, strong_step: float = 0.05,
                      n_snapshots: int = 4, seed: int = 0) -> dict[int, list[tuple]]:
    """Edge records per week where whole ties vanish at fixed per-step rates.

    Each step removes ``round(step * class size at t0)`` more ties of each
    class, so after ``k`` steps the planted dissolution rate is ``k * step``
    up to rounding. Week indices are ``0 .. n_snapshots - 1``.
    """
    rng = np.random.default_rng(seed)
    strong = np.asarray(strong, dtype=bool)
    g = tg0.graph
    ids = g.node_ids
    order = {}
    for cls, step in ((True, strong_step), (False, weak_step)):
        pool = rng.permutation(np.flatnonzero(strong == cls))
        per = int(round(step * len(pool)))
        if per * (n_snapshots - 1) > len(pool):
            raise ValueError("not enough ties of a class for the requested steps")
        for k in range(1, n_snapshots):
            for t in pool[(k - 1) * per:k * per]:
                order[int(t)] = k
    dies = np.array([order.get(t, n_snapshots) for t in range(tg0.n_ties)])
    tie_of = {}
    for t, (a, b) in enumerate(tg0.pairs()):
        tie_of[(a, b)] = tie_of[(b, a)] = t

    out = {}
    for week in range(n_snapshots):
        out[week] = [(ids[s], ids[d], float(w))
                     for s, d, w in zip(g.src, g.dst, g.weight)
                     if dies[tie_of[(int(s), int(d))]] > week]
    return out


def dissolving_snapshots(tg0: TieGraph, strong, **kwargs):
    """:func:`dissolving_series` built into a :class:`SnapshotSeries`."""
    return build_snapshot_series(dissolving_series(tg0, strong, **kwargs))
