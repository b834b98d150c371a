"""Tie feature construction for the heuristic forest and the neural models."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .graph import TieGraph, clustering_coefficients

STRUCTURAL_COLUMNS = (
    "common_neighbors",
    "degree_sum",
    "degree_abs_diff",
    "clustering_sum",
    "jaccard_overlap",
    "adamic_adar",
)
WITHOUT_TIE_FEATURES = "without_tie_features"
WITH_TIE_FEATURES = "with_tie_features"


def structural_matrix(tg: TieGraph) -> np.ndarray:
    """Structural features of every tie, one row per tie, columns ``STRUCTURAL_COLUMNS``.

    Computed on the undirected tie projection. Neighborhoods exclude the tie's
    own endpoints, so a tie's endpoints never count as common neighbors.
    """
    A = tg.adjacency
    deg = tg.degree.astype(float)
    u, v = tg.u, tg.v
    common = np.asarray(A[u].multiply(A[v]).sum(axis=1)).ravel()
    # endpoints are adjacent to each other, so each side loses exactly one neighbor
    union = (deg[u] - 1) + (deg[v] - 1) - common
    jaccard = np.divide(common, union, out=np.zeros_like(common), where=union > 0)
    inv_log = np.zeros_like(deg)
    mask = deg > 1
    inv_log[mask] = 1.0 / np.log(deg[mask])
    aa = np.asarray((A[u] @ sparse.diags(inv_log)).multiply(A[v]).sum(axis=1)).ravel()
    cc = clustering_coefficients(tg)
    return np.column_stack([
        common,
        deg[u] + deg[v],
        np.abs(deg[u] - deg[v]),
        cc[u] + cc[v],
        jaccard,
        aa,
    ])


def structural_features(tg: TieGraph, a: int, b: int) -> np.ndarray:
    """Structural vector for the single tie ``{a, b}`` by direct set arithmetic."""
    tg.index(a, b)
    na = set(tg.neighbors(a).tolist()) - {b}
    nb = set(tg.neighbors(b).tolist()) - {a}
    common = na & nb
    union = na | nb
    deg = tg.degree
    cc = clustering_coefficients(tg)
    aa = sum(1.0 / np.log(deg[w]) for w in common if deg[w] > 1)
    return np.array([
        len(common),
        deg[a] + deg[b],
        abs(int(deg[a]) - int(deg[b])),
        cc[a] + cc[b],
        len(common) / len(union) if union else 0.0,
        aa,
    ], dtype=float)


def node_part(tg: TieGraph) -> np.ndarray | None:
    X = tg.graph.node_features
    if X is None:
        return None
    return np.hstack([X[tg.u], X[tg.v]])


def model_input(tg: TieGraph, mode: str = WITHOUT_TIE_FEATURES) -> np.ndarray:
    """Per-tie model inputs: structural, then endpoint node features, then tie features."""
    if mode not in (WITHOUT_TIE_FEATURES, WITH_TIE_FEATURES):
        raise ValueError(f"unknown input mode {mode!r}")
    parts = [structural_matrix(tg)]
    nodes = node_part(tg)
    if nodes is not None:
        parts.append(nodes)
    if mode == WITH_TIE_FEATURES:
        if tg.features is None or tg.features.shape[1] == 0:
            raise ValueError("tie features requested but the graph has none")
        parts.append(tg.features)
    return np.hstack(parts)


def input_layout(tg: TieGraph, mode: str = WITHOUT_TIE_FEATURES) -> list[str]:
    cols = list(STRUCTURAL_COLUMNS)
    X = tg.graph.node_features
    if X is not None:
        d = X.shape[1]
        cols += [f"node_a_f{i}" for i in range(d)] + [f"node_b_f{i}" for i in range(d)]
    if mode == WITH_TIE_FEATURES:
        cols += [f"tie_f{i}" for i in range(tg.features.shape[1])]
    return cols


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    def transform(self, M: np.ndarray) -> np.ndarray:
        M = np.asarray(M, dtype=float)
        scale = np.where(self.std > 0, self.std, 1.0)
        shift = np.where(self.std > 0, self.mean, 0.0)
        return (M - shift) / scale


def standardize(M: np.ndarray, train_idx) -> tuple[np.ndarray, Scaler]:
    """Column z-scores from train-row statistics; zero-variance columns pass through."""
    train_idx = np.asarray(train_idx)
    if len(train_idx) == 0:
        raise ValueError("standardize needs at least one train row")
    M = np.asarray(M, dtype=float)
    sub = M[train_idx]
    scaler = Scaler(mean=sub.mean(axis=0), std=sub.std(axis=0))
    return scaler.transform(M), scaler


def node_inputs(tg: TieGraph) -> np.ndarray:
    """Node input matrix for the graph models: node features when present, else
    ``[log1p(tie degree), clustering coefficient, 1]``."""
    X = tg.graph.node_features
    if X is not None:
        return X
    return np.column_stack([
        np.log1p(tg.degree.astype(float)),
        clustering_coefficients(tg),
        np.ones(tg.n),
    ])
