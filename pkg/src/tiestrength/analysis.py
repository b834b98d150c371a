"""Definition diagnostics: strong ratios, weight means, label correlations, tie dissolution."""
from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .graph import SnapshotSeries, TieGraph, dissolved_ties
from .labeling import DEFINITIONS, DefinitionId, LabelSet, ThresholdConfig, assign_labels, label_definition


def strong_ratio(labels: LabelSet) -> float:
    if len(labels.strong) == 0:
        raise ValueError("empty tie set")
    return labels.n_strong / len(labels.strong)


def class_weight_means(labels: LabelSet, tg: TieGraph | None = None) -> tuple[float | None, float | None]:
    """Mean tie weight of Strong and Weak ties; ``None`` for an empty class."""
    tg = tg or labels.tie_graph
    w = tg.tie_weight
    s = labels.strong
    return (
        float(w[s].mean()) if s.any() else None,
        float(w[~s].mean()) if (~s).any() else None,
    )


@dataclass(frozen=True, eq=False)
class DefinitionMatrix:
    """Square matrix over definitions; ``NaN`` marks undefined Pearson entries."""

    names: tuple[str, ...]
    values: np.ndarray
    kind: str

    def __getitem__(self, key) -> float:
        a, b = key
        i = self.names.index(a.value if isinstance(a, DefinitionId) else a)
        j = self.names.index(b.value if isinstance(b, DefinitionId) else b)
        return float(self.values[i, j])

    def long_form(self) -> list[tuple[str, str, float, str]]:
        return [(a, b, float(self.values[i, j]), self.kind)
                for i, a in enumerate(self.names) for j, b in enumerate(self.names)]


def definition_matrices(label_sets: Mapping) -> tuple[DefinitionMatrix, DefinitionMatrix]:
    """Pearson correlation and normalized Euclidean distance between 0/1 label vectors.

    Euclidean distance is ``||a - b|| / sqrt(tie count)``. Pearson entries
    involving a constant vector are NaN.
    """
    items = list(label_sets.items())
    if not items:
        raise ValueError("no label sets")
    k = len(items[0][1].strong)
    if any(len(ls.strong) != k for _, ls in items):
        raise ValueError("label sets cover different tie sets")
    names = tuple(d.value if isinstance(d, DefinitionId) else str(d) for d, _ in items)
    V = np.array([ls.strong.astype(float) for _, ls in items])
    m = len(items)
    pear = np.full((m, m), np.nan)
    eucl = np.zeros((m, m))
    centered = V - V.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered ** 2).sum(axis=1))
    for i in range(m):
        for j in range(m):
            eucl[i, j] = math.sqrt(((V[i] - V[j]) ** 2).sum() / k)
            if norms[i] > 0 and norms[j] > 0:
                r = (centered[i] @ centered[j]) / (norms[i] * norms[j])
                pear[i, j] = min(1.0, max(-1.0, r))
    for i in range(m):
        if norms[i] > 0:
            pear[i, i] = 1.0
    return DefinitionMatrix(names, pear, "pearson"), DefinitionMatrix(names, eucl, "euclidean")


@dataclass
class ResilienceReport:
    """Dissolution rates per (definition, horizon) and weak/strong ratios.

    ``ratio[(d, dt)]`` is weak rate over strong rate (absent when the strong
    rate is 0); ``R`` is the mean of all defined ratios.
    """

    strong_rate: dict = field(default_factory=dict)
    weak_rate: dict = field(default_factory=dict)
    n_strong: dict = field(default_factory=dict)
    n_weak: dict = field(default_factory=dict)

    @property
    def definitions(self) -> list:
        return list(dict.fromkeys(d for d, _ in self.strong_rate))

    @property
    def horizons(self) -> list:
        return sorted({dt for _, dt in self.strong_rate})

    @property
    def ratio(self) -> dict:
        return {key: self.weak_rate[key] / s for key, s in self.strong_rate.items() if s > 0}

    def ratio_by_definition(self) -> dict:
        r = self.ratio
        return {d: float(np.mean([r[(d, dt)] for dt in self.horizons if (d, dt) in r]))
                for d in self.definitions if any((d, dt) in r for dt in self.horizons)}

    def ratio_by_horizon(self) -> dict:
        r = self.ratio
        return {dt: float(np.mean([r[(d, dt)] for d in self.definitions if (d, dt) in r]))
                for dt in self.horizons if any((d, dt) in r for d in self.definitions)}

    @property
    def R(self) -> float:
        r = self.ratio
        if not r:
            raise ValueError("no defined weak/strong ratios")
        return float(np.mean([r[key] for key in sorted(r, key=str)]))

    def to_dict(self) -> dict:
        rows = []
        ratio = self.ratio
        for key in self.strong_rate:
            d, dt = key
            rows.append({
                "definition": d, "delta_t": dt,
                "strong_rate": self.strong_rate[key], "weak_rate": self.weak_rate[key],
                "n_strong": self.n_strong.get(key), "n_weak": self.n_weak.get(key),
                "ratio": ratio.get(key),
            })
        return {
            "rows": rows,
            "ratio_by_definition": {str(k): v for k, v in self.ratio_by_definition().items()},
            "ratio_by_horizon": {str(k): v for k, v in self.ratio_by_horizon().items()},
            "R": self.R if ratio else None,
        }


def resilience_from_rates(strong_rate: Mapping, weak_rate: Mapping) -> ResilienceReport:
    """Wrap already-measured rates, keyed by ``(definition, horizon)``."""
    return ResilienceReport(strong_rate=dict(strong_rate), weak_rate=dict(weak_rate))


def _name(d) -> str:
    return d.value if isinstance(d, DefinitionId) else str(d)


def dissolution_study(tg0: TieGraph, labels: Mapping, snapshots: SnapshotSeries, t0: int,
                      delta_ts: Sequence[int]) -> ResilienceReport:
    """Fraction of t0-Strong and t0-Weak ties dissolved ``dt`` weeks later.

    Denominators are all t0 ties of the class.
    """
    report = ResilienceReport()
    for dt in delta_ts:
        week = t0 + dt
        if week not in snapshots.weeks:
            raise KeyError(f"missing snapshot for week {week} (t0={t0}, dt={dt})")
        gone = dissolved_ties(tg0, snapshots.tie_graph_at(week))
        dead = np.zeros(tg0.n_ties, dtype=bool)
        for a, b in gone:
            dead[tg0.index(a, b)] = True
        for d, ls in labels.items():
            s = ls.strong
            if not s.any():
                raise ValueError(f"definition {_name(d)} has no strong ties at t0")
            key = (_name(d), dt)
            report.n_strong[key] = int(s.sum())
            report.n_weak[key] = int((~s).sum())
            report.strong_rate[key] = float(dead[s].mean())
            report.weak_rate[key] = float(dead[~s].mean()) if (~s).any() else 0.0
    return report


def relabel_future(tg_future: TieGraph, reference: LabelSet, reselect: bool = True,
                   config: ThresholdConfig | None = None) -> LabelSet:
    """Labels on a later snapshot under the reference's definition.

    With ``reselect`` the thresholds are chosen afresh on the later snapshot,
    otherwise the reference's thresholds are reused.
    """
    d = DefinitionId.parse(reference.definition)
    if reselect:
        return label_definition(tg_future, d, config)
    return assign_labels(tg_future, d, reference.theta_global, reference.theta_local)


@dataclass(frozen=True)
class FuturePoint:
    delta_t: int
    accuracy: float
    n_surviving: int


def future_label_evaluation(pred_strong, tg0: TieGraph, future_labels: Mapping[int, LabelSet]) -> list[FuturePoint]:
    """Accuracy of t0 predictions against labels ``dt`` weeks later, on ties alive at both times."""
    pred = np.asarray(pred_strong, dtype=bool)
    if len(pred) != tg0.n_ties:
        raise ValueError(f"{len(pred)} predictions for {tg0.n_ties} ties")
    out = []
    for dt in sorted(future_labels):
        ls = future_labels[dt]
        tg1 = ls.tie_graph
        same = tg0.graph.node_ids == tg1.graph.node_ids
        lookup = tg1.graph._id_lookup
        hits, total = 0, 0
        for t, (a, b) in enumerate(tg0.pairs()):
            if not same:
                oa, ob = tg0.graph.node_ids[a], tg0.graph.node_ids[b]
                if oa not in lookup or ob not in lookup:
                    continue
                a, b = lookup[oa], lookup[ob]
            if not tg1.has_tie(a, b):
                continue
            total += 1
            hits += bool(pred[t]) == bool(ls.strong[tg1.index(a, b)])
        if total == 0:
            raise ValueError(f"no tie survives to dt={dt}")
        out.append(FuturePoint(dt, hits / total, total))
    return out


def distribution_table(label_sets: Mapping) -> list[dict]:
    rows = []
    for d, ls in label_sets.items():
        ms, mw = class_weight_means(ls)
        rows.append({
            "definition": _name(d),
            "strong_ratio": strong_ratio(ls),
            "n_strong": ls.n_strong,
            "n_weak": ls.n_weak,
            "mean_strong_weight": ms,
            "mean_weak_weight": mw,
            "theta_global": ls.theta_global,
            "theta_local": ls.theta_local,
        })
    return rows


__all__ = [
    "DEFINITIONS", "DefinitionMatrix", "FuturePoint", "ResilienceReport", "class_weight_means",
    "definition_matrices", "dissolution_study", "distribution_table", "future_label_evaluation",
    "relabel_future", "resilience_from_rates", "strong_ratio",
]
