"""Train/validation/test tie partitions for the weakly supervised and unsupervised settings.

All settings are transductive: models see the whole graph, only labels
outside the train set are masked.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import TieGraph
from .labeling import LabelSet

MODES = ("random", "node_centric", "balanced_hub", "unsupervised")
BALANCED_BAND = (0.25, 0.75)


class SplitError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Split:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    mode: str
    seed: int | None = None
    hub_nodes_train: np.ndarray | None = None
    hub_nodes_val: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    @property
    def n_ties(self) -> int:
        return len(self.train) + len(self.val) + len(self.test)

    def partition_of(self) -> np.ndarray:
        """Per-tie partition name, aligned with tie order."""
        out = np.empty(self.n_ties, dtype=object)
        out[self.train] = "train"
        out[self.val] = "val"
        out[self.test] = "test"
        return out


def _rest(k: int, *taken: np.ndarray) -> np.ndarray:
    mask = np.ones(k, dtype=bool)
    for t in taken:
        mask[t] = False
    return np.flatnonzero(mask)


def random_split(tg: TieGraph, n_train: int, seed: int) -> Split:
    k = tg.n_ties
    if n_train < 1 or 2 * n_train >= k:
        raise SplitError(f"n_train={n_train} too large for {k} ties (need 2*n_train < ties)")
    perm = np.random.default_rng(seed).permutation(k)
    train = np.sort(perm[:n_train])
    val = np.sort(perm[n_train:2 * n_train])
    return Split(
        train=train, val=val, test=_rest(k, train, val), mode="random", seed=seed,
        params={"n_train": n_train},
    )


def unsupervised_split(tg: TieGraph) -> Split:
    empty = np.zeros(0, dtype=np.int64)
    return Split(train=empty, val=empty.copy(), test=np.arange(tg.n_ties), mode="unsupervised")


def _incident(tg: TieGraph, nodes: np.ndarray) -> np.ndarray:
    hit = np.zeros(tg.n, dtype=bool)
    hit[nodes] = True
    return np.flatnonzero(hit[tg.u] | hit[tg.v])


def _hub_split(tg, n_hubs, seed, mode, pick_train, pick_val, params) -> Split:
    rng = np.random.default_rng(seed)
    k = tg.n_ties
    hubs_tr = pick_train(rng)
    train = _incident(tg, hubs_tr)
    owns_train = np.zeros(tg.n, dtype=bool)
    owns_train[tg.u[train]] = True
    owns_train[tg.v[train]] = True
    eligible = np.flatnonzero((tg.degree > 0) & ~owns_train)
    if len(eligible) < n_hubs:
        raise SplitError(
            f"only {len(eligible)} nodes remain eligible as validation hubs, need {n_hubs}"
        )
    hubs_val = pick_val(rng, eligible)
    val = _incident(tg, hubs_val)
    return Split(
        train=train, val=val, test=_rest(k, train, val), mode=mode, seed=seed,
        hub_nodes_train=np.sort(hubs_tr), hub_nodes_val=np.sort(hubs_val),
        params={"n_hubs": n_hubs, **params},
    )


def node_centric_split(tg: TieGraph, n_hubs: int, seed: int) -> Split:
    candidates = np.flatnonzero(tg.degree > 0)
    if n_hubs < 1 or len(candidates) < 2 * n_hubs:
        raise SplitError(f"need at least {2 * n_hubs} nodes with a tie, have {len(candidates)}")

    def pick_train(rng):
        return rng.choice(candidates, size=n_hubs, replace=False)

    def pick_val(rng, eligible):
        return rng.choice(eligible, size=n_hubs, replace=False)

    return _hub_split(tg, n_hubs, seed, "node_centric", pick_train, pick_val, {})


def local_strong_fraction(tg: TieGraph, labels: LabelSet) -> np.ndarray:
    """Fraction of Strong ties among each node's incident ties (NaN for isolated nodes)."""
    strong = labels.strong.astype(float)
    s = np.bincount(tg.u, strong, tg.n) + np.bincount(tg.v, strong, tg.n)
    deg = tg.degree
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(deg > 0, s / deg, np.nan)


def _balanced_pick(rng, pool, frac, n_hubs):
    lo, hi = BALANCED_BAND
    f = frac[pool]
    inside = pool[(f >= lo) & (f <= hi)]
    if len(inside) >= n_hubs:
        return rng.choice(inside, size=n_hubs, replace=False)
    order = np.lexsort((pool, np.abs(f - 0.5)))
    return pool[order[:n_hubs]]


def balanced_hub_split(tg: TieGraph, labels: LabelSet, n_hubs: int, seed: int) -> Split:
    """Node-centric split with hubs drawn from nodes whose local strong fraction is balanced.

    Eligible hubs have at least two incident ties and a strong fraction in
    ``BALANCED_BAND``; if fewer than ``n_hubs`` qualify, the nodes closest to
    0.5 are taken instead. The rule applies to training and validation hubs.
    """
    if len(labels.strong) != tg.n_ties:
        raise SplitError("labels do not cover the tie graph")
    frac = local_strong_fraction(tg, labels)
    multi = np.flatnonzero(tg.degree >= 2)
    if len(multi) == 0:
        raise SplitError("no node has two or more incident ties")
    if n_hubs < 1 or len(np.flatnonzero(tg.degree > 0)) < 2 * n_hubs:
        raise SplitError(f"need at least {2 * n_hubs} nodes with a tie")

    def pick_train(rng):
        if len(multi) < n_hubs:
            raise SplitError(f"only {len(multi)} nodes have two or more ties, need {n_hubs}")
        return _balanced_pick(rng, multi, frac, n_hubs)

    def pick_val(rng, eligible):
        pool = eligible[tg.degree[eligible] >= 2]
        if len(pool) < n_hubs:
            return rng.choice(eligible, size=n_hubs, replace=False)
        return _balanced_pick(rng, pool, frac, n_hubs)

    return _hub_split(tg, n_hubs, seed, "balanced_hub", pick_train, pick_val, {"band": list(BALANCED_BAND)})
