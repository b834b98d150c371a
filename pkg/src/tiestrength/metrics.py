"""Accuracy, macro-F1, confusion counts and average tie-weight difference."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import TieGraph


@dataclass(frozen=True)
class EvalResult:
    """Confusion rows are true class, columns predicted class, order Strong then Weak."""

    accuracy: float
    macro_f1: float
    confusion: tuple[tuple[int, int], tuple[int, int]]
    avg_weight_diff: float
    n_eval: int
    empty_predicted_class: str | None = None
    seeds: tuple = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["confusion"] = [list(r) for r in self.confusion]
        d["seeds"] = list(self.seeds)
        return d


def confusion_matrix(pred_strong: np.ndarray, true_strong: np.ndarray) -> np.ndarray:
    p = np.asarray(pred_strong, dtype=bool)
    t = np.asarray(true_strong, dtype=bool)
    return np.array([
        [int((t & p).sum()), int((t & ~p).sum())],
        [int((~t & p).sum()), int((~t & ~p).sum())],
    ])


def f1_scores(conf: np.ndarray) -> tuple[float, float]:
    out = []
    for k in range(2):
        tp = conf[k, k]
        fp = conf[:, k].sum() - tp
        fn = conf[k, :].sum() - tp
        denom = 2 * tp + fp + fn
        out.append(float(2 * tp / denom) if denom else 0.0)
    return out[0], out[1]


def from_confusion(conf, avg_weight_diff: float = 0.0) -> EvalResult:
    conf = np.asarray(conf, dtype=int)
    n = int(conf.sum())
    if n == 0:
        raise ValueError("empty evaluation set")
    f_s, f_w = f1_scores(conf)
    return EvalResult(
        accuracy=float(np.trace(conf) / n),
        macro_f1=(f_s + f_w) / 2,
        confusion=tuple(tuple(int(x) for x in r) for r in conf),
        avg_weight_diff=avg_weight_diff,
        n_eval=n,
    )


def average_weight_difference(pred_strong, weights) -> tuple[float, str | None]:
    """Mean weight of predicted-Strong ties minus predicted-Weak ties.

    An empty predicted class contributes a mean of 0 and is named in the
    second return value.
    """
    p = np.asarray(pred_strong, dtype=bool)
    w = np.asarray(weights, dtype=float)
    flag = None
    if not p.any():
        flag = "strong"
    elif p.all():
        flag = "weak"
    ms = float(w[p].mean()) if p.any() else 0.0
    mw = float(w[~p].mean()) if (~p).any() else 0.0
    return ms - mw, flag


def evaluate(pred_strong, true_strong, tg: TieGraph, eval_idx=None) -> EvalResult:
    pred = np.asarray(pred_strong, dtype=bool)
    true = np.asarray(true_strong, dtype=bool)
    idx = np.arange(tg.n_ties) if eval_idx is None else np.asarray(eval_idx, dtype=np.int64)
    if len(idx) == 0:
        raise ValueError("empty evaluation set")
    p, t = pred[idx], true[idx]
    diff, flag = average_weight_difference(p, tg.tie_weight[idx])
    res = from_confusion(confusion_matrix(p, t), diff)
    return EvalResult(**{**res.__dict__, "empty_predicted_class": flag})


def aggregate(results: Sequence[EvalResult], seeds: Sequence | None = None) -> EvalResult:
    """Arithmetic mean of each metric; confusion counts are summed."""
    if len(results) == 0:
        raise ValueError("nothing to aggregate")
    k = len(results)
    conf = np.sum([np.asarray(r.confusion) for r in results], axis=0)
    flags = sorted({r.empty_predicted_class for r in results if r.empty_predicted_class})
    return EvalResult(
        accuracy=sum(r.accuracy for r in results) / k,
        macro_f1=sum(r.macro_f1 for r in results) / k,
        confusion=tuple(tuple(int(x) for x in row) for row in conf),
        avg_weight_diff=sum(r.avg_weight_diff for r in results) / k,
        n_eval=sum(r.n_eval for r in results),
        empty_predicted_class=",".join(flags) or None,
        seeds=tuple(seeds) if seeds is not None else (),
    )
