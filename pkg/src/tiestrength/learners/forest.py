"""Bagged Gini decision trees over structural tie features."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 8
    min_leaf: int = 2
    bootstrap_fraction: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")


def gini(counts: np.ndarray) -> np.ndarray:
    """Gini impurity for rows of class counts."""
    n = counts.sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / n[..., None]
    return np.where(n > 0, 1.0 - (p ** 2).sum(axis=-1), 0.0)


class DecisionTree:
    """Binary classification tree stored as flat arrays; leaf value is P(strong)."""

    def __init__(self, max_depth: int, min_leaf: int, n_sub: int):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.n_sub = n_sub
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def _new(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.value) - 1

    def _best_split(self, X, y, rng):
        n, f = X.shape
        feats = rng.choice(f, size=min(self.n_sub, f), replace=False)
        parent = gini(np.array([n - y.sum(), y.sum()], dtype=float))
        best = (parent, None, None)
        for j in feats:
            order = np.argsort(X[:, j], kind="stable")
            xs, ys = X[order, j], y[order]
            left_pos = np.cumsum(ys)[:-1].astype(float)
            left_n = np.arange(1, n, dtype=float)
            right_pos = ys.sum() - left_pos
            right_n = n - left_n
            valid = (xs[1:] > xs[:-1]) & (left_n >= self.min_leaf) & (right_n >= self.min_leaf)
            if not valid.any():
                continue
            gl = gini(np.column_stack([left_n - left_pos, left_pos]))
            gr = gini(np.column_stack([right_n - right_pos, right_pos]))
            score = (left_n * gl + right_n * gr) / n
            score[~valid] = np.inf
            i = int(np.argmin(score))
            if score[i] < best[0] - 1e-12:
                best = (score[i], int(j), (xs[i] + xs[i + 1]) / 2)
        return best[1], best[2]

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "DecisionTree":
        stack = [(np.arange(len(y)), 0, self._new(float(y.mean())))]
        while stack:
            idx, depth, node = stack.pop()
            yy = y[idx]
            if depth >= self.max_depth or len(idx) < 2 * self.min_leaf or yy.min() == yy.max():
                continue
            j, t = self._best_split(X[idx], yy, rng)
            if j is None:
                continue
            go_left = X[idx, j] <= t
            li, ri = idx[go_left], idx[~go_left]
            self.feature[node] = j
            self.threshold[node] = float(t)
            self.left[node] = self._new(float(y[li].mean()))
            self.right[node] = self._new(float(y[ri].mean()))
            stack.append((ri, depth + 1, self.right[node]))
            stack.append((li, depth + 1, self.left[node]))
        self._freeze()
        return self

    def _freeze(self):
        self.feature_ = np.array(self.feature, dtype=np.int64)
        self.threshold_ = np.array(self.threshold)
        self.left_ = np.array(self.left, dtype=np.int64)
        self.right_ = np.array(self.right, dtype=np.int64)
        self.value_ = np.array(self.value)

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature_[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            nd = node[rows]
            go_left = X[rows, self.feature_[nd]] <= self.threshold_[nd]
            node[rows] = np.where(go_left, self.left_[nd], self.right_[nd])
            active = self.feature_[node] >= 0
        return self.value_[node]


@dataclass
class ForestModel:
    trees: list[DecisionTree]
    config: ForestConfig

    def votes(self, X: np.ndarray) -> np.ndarray:
        """Fraction of trees voting Strong per row."""
        X = np.asarray(X, dtype=float)
        v = np.zeros(len(X))
        for t in self.trees:
            v += t.predict_value(X) > 0.5
        return v / len(self.trees)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        s = self.votes(X)
        return np.column_stack([1 - s, s])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.votes(X) > 0.5


def train_forest(features: np.ndarray, strong: np.ndarray, train_idx, config: ForestConfig | None = None) -> ForestModel:
    config = config or ForestConfig()
    X = np.asarray(features, dtype=float)[np.asarray(train_idx)]
    y = np.asarray(strong, dtype=bool)[np.asarray(train_idx)].astype(float)
    if len(y) < 2:
        raise ValueError("forest needs at least two training examples")
    if y.min() == y.max():
        raise ValueError("forest needs both classes in the training set")
    rng = np.random.default_rng(config.seed)
    n_sub = math.ceil(math.sqrt(X.shape[1]))
    n_boot = max(1, round(config.bootstrap_fraction * len(y)))
    trees = []
    for _ in range(config.n_trees):
        rows = rng.integers(0, len(y), size=n_boot)
        trees.append(DecisionTree(config.max_depth, config.min_leaf, n_sub).fit(X[rows], y[rows], rng))
    return ForestModel(trees=trees, config=config)
