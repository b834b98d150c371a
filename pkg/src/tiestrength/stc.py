"""Strong triadic closure: open wedges, greedy weak cover, violation audit."""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .graph import TieGraph
from .labeling import STC, LabelSet


@dataclass(frozen=True, eq=False)
class WedgeGraph:
    """Open wedges as edges between tie indices ``a[w] < b[w]`` sharing ``center[w]``."""

    n_ties: int
    a: np.ndarray
    b: np.ndarray
    center: np.ndarray

    def __len__(self) -> int:
        return len(self.a)

    def pairs(self) -> set[tuple[int, int]]:
        return set(zip(self.a.tolist(), self.b.tolist()))

    def degree(self) -> np.ndarray:
        return np.bincount(np.concatenate([self.a, self.b]), minlength=self.n_ties)

    def incidence(self) -> sparse.csr_matrix:
        """Tie-by-wedge incidence."""
        w = len(self)
        rows = np.concatenate([self.a, self.b])
        cols = np.concatenate([np.arange(w), np.arange(w)])
        return sparse.csr_matrix((np.ones(2 * w), (rows, cols)), shape=(self.n_ties, w))


def _incident_ties(tg: TieGraph):
    node = np.concatenate([tg.u, tg.v])
    nbr = np.concatenate([tg.v, tg.u])
    tie = np.concatenate([np.arange(tg.n_ties), np.arange(tg.n_ties)])
    order = np.lexsort((nbr, node))
    ptr = np.concatenate([[0], np.cumsum(np.bincount(node, minlength=tg.n))])
    return ptr, nbr[order], tie[order]


def enumerate_wedges(tg: TieGraph) -> WedgeGraph:
    n = tg.n
    tie_keys = tg.u * n + tg.v  # already sorted
    ptr, nbr, tie = _incident_ties(tg)
    a_parts, b_parts, c_parts = [], [], []
    for c in np.flatnonzero(np.diff(ptr) >= 2):
        lo, hi = ptr[c], ptr[c + 1]
        i, j = np.triu_indices(hi - lo, 1)
        x, y = nbr[lo + i], nbr[lo + j]  # x < y since neighbors are sorted
        keys = x * n + y
        pos = np.searchsorted(tie_keys, keys)
        pos[pos == len(tie_keys)] = 0
        open_ = tie_keys[pos] != keys
        ta, tb = tie[lo + i][open_], tie[lo + j][open_]
        a_parts.append(np.minimum(ta, tb))
        b_parts.append(np.maximum(ta, tb))
        c_parts.append(np.full(len(ta), c))
    if not a_parts:
        empty = np.zeros(0, dtype=np.int64)
        return WedgeGraph(tg.n_ties, empty, empty.copy(), empty.copy())
    a = np.concatenate(a_parts)
    b = np.concatenate(b_parts)
    center = np.concatenate(c_parts)
    order = np.lexsort((b, a))
    return WedgeGraph(tg.n_ties, a[order], b[order], center[order])


def greedy_weak_cover(wedges: WedgeGraph) -> np.ndarray:
    """Max-uncovered-degree greedy vertex cover; ties broken by smaller tie index."""
    k = wedges.n_ties
    weak = np.zeros(k, dtype=bool)
    if len(wedges) == 0:
        return weak
    inc = wedges.incidence()
    deg = wedges.degree().astype(np.int64)
    w_count = len(wedges)
    covered = np.zeros(w_count, dtype=bool)
    heap = [(-int(d), t) for t, d in enumerate(deg) if d > 0]
    heapq.heapify(heap)
    while heap:
        neg, t = heapq.heappop(heap)
        if weak[t] or -neg != deg[t]:
            if not weak[t] and deg[t] > 0:
                heapq.heappush(heap, (-int(deg[t]), t))
            continue
        weak[t] = True
        deg[t] = 0
        for w in inc.indices[inc.indptr[t]:inc.indptr[t + 1]]:
            if covered[w]:
                continue
            covered[w] = True
            s = wedges.a[w] if wedges.b[w] == t else wedges.b[w]
            deg[s] -= 1
    return weak


def stc_greedy(tg: TieGraph, wedges: WedgeGraph | None = None) -> LabelSet:
    if wedges is None:
        wedges = enumerate_wedges(tg)
    weak = greedy_weak_cover(wedges)
    return LabelSet(definition=STC, strong=~weak, tie_graph=tg)


def verify_stc(tg: TieGraph, labels: LabelSet | np.ndarray, wedges: WedgeGraph | None = None) -> int:
    """Number of open wedges whose two ties are both Strong."""
    strong = labels.strong if isinstance(labels, LabelSet) else np.asarray(labels, dtype=bool)
    if len(strong) != tg.n_ties:
        raise ValueError(f"{len(strong)} labels for {tg.n_ties} ties")
    if wedges is None:
        wedges = enumerate_wedges(tg)
    return int((strong[wedges.a] & strong[wedges.b]).sum())
