"""Independent reference implementations used as test oracles.

These are deliberately naive: plain Python loops over dicts and sets, no
sharing of code paths with the package.
"""
from __future__ import annotations

import itertools
import math


def directed_weights(records):
    """{(src, dst): summed weight} from (src, dst, weight) records."""
    out = {}
    for s, d, w, *_ in records:
        out[(s, d)] = out.get((s, d), 0.0) + w
    return out


def ties_of(weights):
    """{frozenset{a, b}: (w_ab, w_ba)} with 0 for a missing direction."""
    out = {}
    for (s, d) in weights:
        key = frozenset((s, d))
        a, b = sorted((s, d))
        out[key] = (weights.get((a, b), 0.0), weights.get((b, a), 0.0))
    return out


def local_threshold(weights, node, theta):
    outs = sorted((w for (s, _), w in weights.items() if s == node), reverse=True)
    if not outs:
        return math.inf
    return outs[min(theta, len(outs)) - 1]


def is_strong(weights, a, b, definition, big_theta=None, small_theta=None):
    """Per-tie predicate straight from the seven rules; ``a < b``."""
    wab = weights.get((a, b), 0.0)
    wba = weights.get((b, a), 0.0)
    bi = wab > 0 and wba > 0
    total = wab + wba
    if definition == "I":
        return bi
    if definition == "II":
        return total >= big_theta
    if definition == "III":
        return bi and total >= big_theta
    wa = local_threshold(weights, a, small_theta)
    wb = local_threshold(weights, b, small_theta)
    if definition == "IV":
        return wab >= wa and wba >= wb
    if definition == "V":
        return wab >= wa or wba >= wb
    if definition == "VI":
        return total >= wa + wb
    if definition == "VII":
        return bi and total >= wa + wb
    raise ValueError(definition)


def neighbor_sets(pairs):
    nb = {}
    for a, b in pairs:
        nb.setdefault(a, set()).add(b)
        nb.setdefault(b, set()).add(a)
    return nb


def open_wedges(pairs):
    """Set of frozenset{tie_i, tie_j} index pairs forming open wedges."""
    pairs = [tuple(sorted(p)) for p in pairs]
    idx = {p: i for i, p in enumerate(pairs)}
    out = set()
    for i, j in itertools.combinations(range(len(pairs)), 2):
        shared = set(pairs[i]) & set(pairs[j])
        if len(shared) != 1:
            continue
        x = (set(pairs[i]) - shared).pop()
        y = (set(pairs[j]) - shared).pop()
        if tuple(sorted((x, y))) not in idx:
            out.add(frozenset((i, j)))
    return out


def min_vertex_cover_size(n_vertices, edges):
    """Exhaustive minimum vertex cover size (edges as 2-element frozensets)."""
    edges = [tuple(e) for e in edges]
    if not edges:
        return 0
    for k in range(n_vertices + 1):
        for cover in itertools.combinations(range(n_vertices), k):
            c = set(cover)
            if all(a in c or b in c for a, b in edges):
                return k
    return n_vertices


def clustering(pairs, node):
    nb = neighbor_sets(pairs).get(node, set())
    k = len(nb)
    if k < 2:
        return 0.0
    ties = {frozenset(p) for p in pairs}
    links = sum(1 for x, y in itertools.combinations(sorted(nb), 2) if frozenset((x, y)) in ties)
    return links / (k * (k - 1) / 2)


def structural(pairs, a, b):
    nb = neighbor_sets(pairs)
    na, nbb = nb[a] - {b}, nb[b] - {a}
    common = na & nbb
    union = na | nbb
    da, db = len(nb[a]), len(nb[b])
    return [
        len(common),
        da + db,
        abs(da - db),
        clustering(pairs, a) + clustering(pairs, b),
        len(common) / len(union) if union else 0.0,
        sum(1 / math.log(len(nb[w])) for w in common if len(nb[w]) > 1),
    ]


def pearson(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        return math.nan
    return sxy / math.sqrt(sxx * syy)
