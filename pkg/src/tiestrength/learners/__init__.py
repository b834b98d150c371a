"""Tie strength predictors and their shared training entry points."""
from __future__ import annotations

import numpy as np

from ..features import (
    WITH_TIE_FEATURES,
    WITHOUT_TIE_FEATURES,
    model_input,
    node_inputs,
    standardize,
    structural_matrix,
)
from ..graph import TieGraph
from ..labeling import LabelSet
from .forest import ForestConfig, ForestModel, train_forest
from .nn import GCN, GTN, MLP, NeuralConfig, TrainedModel, fit, gradient_check
from .reweight import ClassWeights, quantity_reweight

__all__ = [
    "ClassWeights", "ForestConfig", "ForestModel", "GCN", "GTN", "MLP", "NeuralConfig",
    "TrainedModel", "gradient_check", "quantity_reweight", "train_forest", "train_mlp",
    "train_gcn", "train_gtn", "predict_ties", "MODELS",
]

MODELS = ("heuristic_forest", "mlp", "mlp_with_features", "gcn", "gtn", "stc_greedy")


def _strong(labels) -> np.ndarray:
    return labels.strong if isinstance(labels, LabelSet) else np.asarray(labels, dtype=bool)


def _zscore_nodes(H: np.ndarray) -> np.ndarray:
    mu, sd = H.mean(0), H.std(0)
    return np.where(sd > 0, (H - mu) / np.where(sd > 0, sd, 1.0), H)


def train_mlp(inputs, labels, split, config: NeuralConfig | None = None, mode: str = WITHOUT_TIE_FEATURES) -> TrainedModel:
    """MLP on per-tie inputs, standardized with train-row statistics."""
    config = config or NeuralConfig()
    if mode not in (WITHOUT_TIE_FEATURES, WITH_TIE_FEATURES):
        raise ValueError(f"unknown input mode {mode!r}")
    strong = _strong(labels)
    X = np.asarray(inputs, dtype=float)
    if X.ndim != 2 or X.shape[0] != len(strong):
        raise ValueError(f"inputs have shape {X.shape}, expected ({len(strong)}, d)")
    Z, _ = standardize(X, split.train)
    return fit(MLP(Z, config.hidden_dim), strong, split, config)


def train_gcn(tg: TieGraph, tie_inputs, labels, split, config: NeuralConfig | None = None) -> TrainedModel:
    """GCN over the tie adjacency; ``tie_inputs`` (may be None) feed the tie head."""
    config = config or NeuralConfig()
    T = None
    if tie_inputs is not None:
        T, _ = standardize(tie_inputs, split.train)
    H0 = _zscore_nodes(node_inputs(tg))
    return fit(GCN(tg, H0, T, config.hidden_dim), _strong(labels), split, config)


def train_gtn(tg: TieGraph, labels, split, config: NeuralConfig | None = None) -> TrainedModel:
    config = config or NeuralConfig()
    if tg.features is None or tg.features.shape[1] == 0:
        raise ValueError("GTN needs tie features; use train_gcn for graphs without them")
    F, _ = standardize(tg.features, split.train)
    H0 = _zscore_nodes(node_inputs(tg))
    return fit(GTN(tg, H0, F, config.hidden_dim), _strong(labels), split, config)


def predict_ties(model_name: str, tg: TieGraph, labels, split, *, seed: int = 0,
                 forest: ForestConfig | None = None, neural: NeuralConfig | None = None) -> np.ndarray:
    """Train ``model_name`` on ``split.train`` and return Strong predictions for every tie."""
    strong = _strong(labels)
    if model_name == "heuristic_forest":
        cfg = forest or ForestConfig()
        cfg = ForestConfig(**{**cfg.__dict__, "seed": seed})
        X = structural_matrix(tg)
        return train_forest(X, strong, split.train, cfg).predict(X)
    if model_name == "stc_greedy":
        from ..stc import stc_greedy
        return stc_greedy(tg).strong
    cfg = neural or NeuralConfig()
    cfg = NeuralConfig(**{**cfg.__dict__, "seed": seed})
    if model_name == "mlp":
        return train_mlp(model_input(tg, WITHOUT_TIE_FEATURES), strong, split, cfg).predict()
    if model_name == "mlp_with_features":
        return train_mlp(model_input(tg, WITH_TIE_FEATURES), strong, split, cfg, WITH_TIE_FEATURES).predict()
    if model_name == "gcn":
        return train_gcn(tg, model_input(tg, WITH_TIE_FEATURES), strong, split, cfg).predict()
    if model_name == "gtn":
        return train_gtn(tg, strong, split, cfg).predict()
    raise ValueError(f"unknown model {model_name!r}; expected one of {MODELS}")
