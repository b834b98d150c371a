"""Full-batch numpy neural tie classifiers with hand-written backpropagation.

Every model maps its fixed inputs to one pair of logits per tie (column 1 is
Strong). Parameters live in a plain ``dict[str, ndarray]`` so the optimizer,
the gradient checker and serialization treat all models alike.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse

from ..graph import TieGraph
from .reweight import ClassWeights, quantity_reweight

FORMAT_VERSION = 1


@dataclass(frozen=True)
class NeuralConfig:
    hidden_dim: int = 64
    learning_rate: float = 0.01
    max_epochs: int = 200
    patience: int = 20
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    reweight: bool = False

    def __post_init__(self):
        if self.hidden_dim < 1 or self.learning_rate <= 0 or self.max_epochs < 0 or self.patience < 1:
            raise ValueError(f"invalid neural config {self}")


def _uniform(rng, fan_in, shape):
    bound = 1.0 / math.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def relu(x):
    return np.maximum(x, 0.0)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def weighted_cross_entropy(logits, y, idx, sample_weight=None):
    """Mean cross-entropy over ``idx``, weighted and normalized by the weight sum.

    Returns the loss and its gradient with respect to the full logits array.
    """
    p = softmax(logits[idx])
    yi = y[idx]
    w = np.ones(len(idx)) if sample_weight is None else sample_weight
    total = w.sum()
    loss = float(-(w * np.log(p[np.arange(len(idx)), yi])).sum() / total)
    g = p.copy()
    g[np.arange(len(idx)), yi] -= 1.0
    g *= (w / total)[:, None]
    dlogits = np.zeros_like(logits)
    dlogits[idx] = g
    return loss, dlogits


class Model:
    """Base: subclasses define ``init_params``, ``forward`` and ``backward``."""

    name = "model"

    def init_params(self, rng) -> dict:
        raise NotImplementedError

    def forward(self, params) -> tuple[np.ndarray, dict]:
        raise NotImplementedError

    def backward(self, params, cache, dlogits) -> dict:
        raise NotImplementedError

    def loss(self, params, y, idx, sample_weight=None) -> float:
        return weighted_cross_entropy(self.forward(params)[0], y, idx, sample_weight)[0]

    def loss_and_grad(self, params, y, idx, sample_weight=None):
        logits, cache = self.forward(params)
        loss, dlogits = weighted_cross_entropy(logits, y, idx, sample_weight)
        return loss, self.backward(params, cache, dlogits)

    def spec(self) -> dict:
        return {"name": self.name}


class MLP(Model):
    """Three affine layers ``in -> hidden -> hidden -> 2`` with rectifiers between."""

    name = "mlp"

    def __init__(self, inputs: np.ndarray, hidden_dim: int = 64):
        self.X = np.asarray(inputs, dtype=float)
        self.hidden = hidden_dim

    def init_params(self, rng):
        d, h = self.X.shape[1], self.hidden
        return {
            "W1": _uniform(rng, d, (d, h)), "b1": _uniform(rng, d, h),
            "W2": _uniform(rng, h, (h, h)), "b2": _uniform(rng, h, h),
            "W3": _uniform(rng, h, (h, 2)), "b3": _uniform(rng, h, 2),
        }

    def forward(self, params):
        Z1 = self.X @ params["W1"] + params["b1"]
        H1 = relu(Z1)
        Z2 = H1 @ params["W2"] + params["b2"]
        H2 = relu(Z2)
        out = H2 @ params["W3"] + params["b3"]
        return out, {"Z1": Z1, "H1": H1, "Z2": Z2, "H2": H2}

    def backward(self, params, cache, dout):
        g = {"W3": cache["H2"].T @ dout, "b3": dout.sum(0)}
        dH2 = dout @ params["W3"].T
        cache["dH2"] = dH2
        dZ2 = dH2 * (cache["Z2"] > 0)
        g["W2"] = cache["H1"].T @ dZ2
        g["b2"] = dZ2.sum(0)
        dZ1 = (dZ2 @ params["W2"].T) * (cache["Z1"] > 0)
        g["W1"] = self.X.T @ dZ1
        g["b1"] = dZ1.sum(0)
        return g

    def spec(self):
        return {"name": self.name, "hidden_dim": self.hidden, "n_inputs": self.X.shape[1]}


class _TieHead:
    """Linear tie scorer on ``[h_a || h_b]``, averaged over both endpoint orders so
    the score does not depend on which endpoint has the smaller id; optional
    per-tie inputs enter linearly."""

    def __init__(self, u, v, tie_inputs):
        self.u, self.v = u, v
        self.T = None if tie_inputs is None else np.asarray(tie_inputs, dtype=float)

    def init(self, rng, h, params):
        fan = 2 * h + (0 if self.T is None else self.T.shape[1])
        params["Wh"] = _uniform(rng, fan, (2 * h, 2))
        if self.T is not None:
            params["Wt"] = _uniform(rng, fan, (self.T.shape[1], 2))
        params["bh"] = _uniform(rng, fan, 2)

    def forward(self, params, H):
        S = 0.5 * np.hstack([H[self.u] + H[self.v], H[self.v] + H[self.u]])
        out = S @ params["Wh"] + params["bh"]
        if self.T is not None:
            out = out + self.T @ params["Wt"]
        return out, S

    def backward(self, params, S, dout, n, g):
        g["Wh"] = S.T @ dout
        g["bh"] = dout.sum(0)
        if self.T is not None:
            g["Wt"] = self.T.T @ dout
        dS = dout @ params["Wh"].T
        h = dS.shape[1] // 2
        dsum = 0.5 * (dS[:, :h] + dS[:, h:])
        dH = np.zeros((n, h))
        np.add.at(dH, self.u, dsum)
        np.add.at(dH, self.v, dsum)
        return dH


def normalized_adjacency(tg: TieGraph) -> sparse.csr_matrix:
    """``D^-1/2 (A + I) D^-1/2`` over the undirected tie adjacency."""
    A = tg.adjacency + sparse.identity(tg.n, format="csr")
    d = np.asarray(A.sum(axis=1)).ravel()
    inv = 1.0 / np.sqrt(d)
    return (sparse.diags(inv) @ A @ sparse.diags(inv)).tocsr()


class GCN(Model):
    """Two graph convolutions ``relu(Â H W + b)`` followed by the tie head."""

    name = "gcn"

    def __init__(self, tg: TieGraph, node_inputs: np.ndarray, tie_inputs=None, hidden_dim: int = 64):
        self.A = normalized_adjacency(tg)
        self.H0 = np.asarray(node_inputs, dtype=float)
        self.AH0 = self.A @ self.H0
        self.hidden = hidden_dim
        self.n = tg.n
        self.head = _TieHead(tg.u, tg.v, tie_inputs)

    def init_params(self, rng):
        d, h = self.H0.shape[1], self.hidden
        p = {
            "W1": _uniform(rng, d, (d, h)), "b1": _uniform(rng, d, h),
            "W2": _uniform(rng, h, (h, h)), "b2": _uniform(rng, h, h),
        }
        self.head.init(rng, h, p)
        return p

    def embed(self, params):
        Z1 = self.AH0 @ params["W1"] + params["b1"]
        H1 = relu(Z1)
        AH1 = self.A @ H1
        Z2 = AH1 @ params["W2"] + params["b2"]
        H2 = relu(Z2)
        return H2, {"Z1": Z1, "H1": H1, "AH1": AH1, "Z2": Z2, "H2": H2}

    def forward(self, params):
        H2, cache = self.embed(params)
        out, S = self.head.forward(params, H2)
        cache["S"] = S
        return out, cache

    def backward(self, params, cache, dout):
        g = {}
        dH2 = self.head.backward(params, cache["S"], dout, self.n, g)
        cache["dH2"] = dH2
        dZ2 = dH2 * (cache["Z2"] > 0)
        g["W2"] = cache["AH1"].T @ dZ2
        g["b2"] = dZ2.sum(0)
        dH1 = self.A.T @ (dZ2 @ params["W2"].T)
        dZ1 = dH1 * (cache["Z1"] > 0)
        g["W1"] = self.AH0.T @ dZ1
        g["b1"] = dZ1.sum(0)
        return g

    def spec(self):
        return {"name": self.name, "hidden_dim": self.hidden}


class GTN(Model):
    """Two single-head attention layers that inject tie features into scores and messages.

    For a message from neighbor ``j`` to node ``i`` over tie ``t``:
    ``score = (Q h_i) . (K h_j + E f_t) / sqrt(hidden)``, softmax over the
    neighbors of ``i``, message ``alpha * (V h_j + E f_t)``. The layer output
    is ``relu(sum of messages + S h_i + b)``.
    """

    name = "gtn"
    n_layers = 2

    def __init__(self, tg: TieGraph, node_inputs: np.ndarray, tie_features: np.ndarray, hidden_dim: int = 64):
        F = np.asarray(tie_features, dtype=float)
        if F.ndim != 2 or F.shape[0] != tg.n_ties or F.shape[1] == 0:
            raise ValueError("GTN needs a tie feature matrix; use GCN for graphs without one")
        self.F = F
        self.H0 = np.asarray(node_inputs, dtype=float)
        self.hidden = hidden_dim
        self.n = tg.n
        k = tg.n_ties
        # directed messages src -> dst over each tie, grouped by destination
        self.dst = np.concatenate([tg.u, tg.v])
        self.src = np.concatenate([tg.v, tg.u])
        self.tie = np.concatenate([np.arange(k), np.arange(k)])
        self.head = _TieHead(tg.u, tg.v, None)

    def init_params(self, rng):
        p = {}
        d_in, h, de = self.H0.shape[1], self.hidden, self.F.shape[1]
        for layer in range(self.n_layers):
            for m in ("Q", "K", "V", "S"):
                p[f"{m}{layer}"] = _uniform(rng, d_in, (d_in, h))
            p[f"E{layer}"] = _uniform(rng, de, (de, h))
            p[f"b{layer}"] = _uniform(rng, d_in, h)
            d_in = h
        self.head.init(rng, h, p)
        return p

    def _attention(self, q, key):
        scores = (q[self.dst] * key).sum(1) / math.sqrt(self.hidden)
        peak = np.full(self.n, -np.inf)
        np.maximum.at(peak, self.dst, scores)
        e = np.exp(scores - peak[self.dst])
        denom = np.bincount(self.dst, e, self.n)
        return e / denom[self.dst]

    def attention(self, params, layer: int = 0) -> np.ndarray:
        """Attention weight per directed message (aligned with ``self.dst``)."""
        H = self.H0
        for l in range(layer):
            H = self._layer(params, l, H)[0]
        ef = self.F @ params[f"E{layer}"]
        key = (H @ params[f"K{layer}"])[self.src] + ef[self.tie]
        return self._attention(H @ params[f"Q{layer}"], key)

    def _layer(self, params, l, H):
        q = H @ params[f"Q{l}"]
        kk = H @ params[f"K{l}"]
        vv = H @ params[f"V{l}"]
        ef = self.F @ params[f"E{l}"]
        key = kk[self.src] + ef[self.tie]
        val = vv[self.src] + ef[self.tie]
        alpha = self._attention(q, key)
        M = np.zeros((self.n, self.hidden))
        np.add.at(M, self.dst, alpha[:, None] * val)
        Z = M + H @ params[f"S{l}"] + params[f"b{l}"]
        return relu(Z), {"H": H, "q": q, "key": key, "val": val, "alpha": alpha, "Z": Z}

    def forward(self, params):
        H = self.H0
        caches = []
        for l in range(self.n_layers):
            H, c = self._layer(params, l, H)
            caches.append(c)
        out, S = self.head.forward(params, H)
        return out, {"layers": caches, "S": S}

    def backward(self, params, cache, dout):
        g = {}
        dH = self.head.backward(params, cache["S"], dout, self.n, g)
        cache["dH2"] = dH
        rt = math.sqrt(self.hidden)
        for l in reversed(range(self.n_layers)):
            c = cache["layers"][l]
            H = c["H"]
            dZ = dH * (c["Z"] > 0)
            g[f"b{l}"] = dZ.sum(0)
            g[f"S{l}"] = H.T @ dZ
            dH_in = dZ @ params[f"S{l}"].T
            dmsg = dZ[self.dst]
            alpha = c["alpha"]
            dval = alpha[:, None] * dmsg
            dalpha = (dmsg * c["val"]).sum(1)
            weighted = np.bincount(self.dst, alpha * dalpha, self.n)
            dscore = alpha * (dalpha - weighted[self.dst])
            dq_e = (dscore / rt)[:, None] * c["key"]
            dkey = (dscore / rt)[:, None] * c["q"][self.dst]
            dq = np.zeros_like(c["q"])
            np.add.at(dq, self.dst, dq_e)
            dkk = np.zeros_like(c["q"])
            np.add.at(dkk, self.src, dkey)
            dvv = np.zeros_like(c["q"])
            np.add.at(dvv, self.src, dval)
            def_ = np.zeros((self.F.shape[0], self.hidden))
            np.add.at(def_, self.tie, dkey + dval)
            g[f"Q{l}"] = H.T @ dq
            g[f"K{l}"] = H.T @ dkk
            g[f"V{l}"] = H.T @ dvv
            g[f"E{l}"] = self.F.T @ def_
            dH = (dH_in + dq @ params[f"Q{l}"].T + dkk @ params[f"K{l}"].T
                  + dvv @ params[f"V{l}"].T)
        return g

    def spec(self):
        return {"name": self.name, "hidden_dim": self.hidden, "layers": self.n_layers}


class Adam:
    def __init__(self, params: dict, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        c1 = 1 - self.b1 ** self.t
        c2 = 1 - self.b2 ** self.t
        for k in sorted(params):
            g = grads[k]
            self.m[k] = self.b1 * self.m[k] + (1 - self.b1) * g
            self.v[k] = self.b2 * self.v[k] + (1 - self.b2) * g * g
            params[k] -= self.lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)


@dataclass
class TrainedModel:
    model: Model
    params: dict
    config: NeuralConfig
    best_epoch: int = 0
    history: list = field(default_factory=list)
    class_weights: ClassWeights | None = None

    def predict_proba(self) -> np.ndarray:
        return softmax(self.model.forward(self.params)[0])

    def predict(self) -> np.ndarray:
        """Strong indicator per tie (all ties; the setting is transductive)."""
        p = self.predict_proba()
        return p[:, 1] > p[:, 0]

    def to_json(self) -> str:
        return json.dumps({
            "format": "tiestrength-neural",
            "version": FORMAT_VERSION,
            "model": self.model.spec(),
            "config": asdict(self.config),
            "best_epoch": self.best_epoch,
            "params": {k: {"shape": list(v.shape), "data": v.ravel().tolist()}
                       for k, v in sorted(self.params.items())},
        })

    @staticmethod
    def params_from_json(text: str) -> tuple[dict, dict]:
        """Parameters and header from :meth:`to_json` output."""
        doc = json.loads(text)
        if doc.get("format") != "tiestrength-neural" or doc.get("version") != FORMAT_VERSION:
            raise ValueError("not a tiestrength neural model dump of a supported version")
        params = {k: np.array(v["data"], dtype=float).reshape(v["shape"])
                  for k, v in doc["params"].items()}
        header = {k: doc[k] for k in ("model", "config", "best_epoch")}
        return params, header


def fit(model: Model, strong, split, config: NeuralConfig) -> TrainedModel:
    """Full-batch Adam with early stopping on validation accuracy.

    The parameters evaluated at each epoch are those before that epoch's
    update, so ``max_epochs=0`` returns the initialization. The snapshot with
    the best validation accuracy is returned; ties go to the lower
    validation loss, then to the earlier epoch.
    """
    y = np.asarray(strong, dtype=bool).astype(np.int64)
    train = np.asarray(split.train, dtype=np.int64)
    val = np.asarray(split.val, dtype=np.int64)
    if len(train) == 0:
        raise ValueError("empty training set")
    weights = None
    cw = None
    if config.reweight:
        cw = quantity_reweight(y[train].astype(bool))
        weights = cw.per_sample(y[train].astype(bool))
    select = val if len(val) else train
    rng = np.random.default_rng(config.seed)
    params = model.init_params(rng)
    opt = Adam(params, config.learning_rate, config.beta1, config.beta2, config.eps)
    best_key, best_epoch = (-1.0, 0.0), 0
    best = {k: v.copy() for k, v in params.items()}
    history = []
    for epoch in range(config.max_epochs + 1):
        logits, cache = model.forward(params)
        pred = logits[:, 1] > logits[:, 0]
        acc = float((pred[select] == y[select].astype(bool)).mean())
        val_loss, _ = weighted_cross_entropy(logits, y, select)
        loss, dlogits = weighted_cross_entropy(logits, y, train, weights)
        history.append((epoch, loss, acc))
        if (acc, -val_loss) > best_key:
            best_key, best_epoch = (acc, -val_loss), epoch
            best = {k: v.copy() for k, v in params.items()}
        if epoch == config.max_epochs or epoch - best_epoch >= config.patience:
            break
        opt.step(params, model.backward(params, cache, dlogits))
    return TrainedModel(model=model, params=best, config=config, best_epoch=best_epoch,
                        history=history, class_weights=cw)


def gradient_check(model: Model, params: dict, y, idx, sample_weight=None,
                   n_entries: int = 50, h: float = 1e-5, seed: int = 0, floor: float = 1e-6) -> float:
    """Max relative error between analytic and central-difference gradients.

    Checks a random subset of at least ``n_entries`` parameter entries (all of
    them when there are fewer). Relative error is
    ``|a - n| / max(|a|, |n|, floor)``.
    """
    y = np.asarray(y, dtype=np.int64)
    idx = np.asarray(idx, dtype=np.int64)
    loss, grads = model.loss_and_grad(params, y, idx, sample_weight)
    if not math.isfinite(loss):
        raise ValueError(f"non-finite loss {loss}")
    entries = [(k, i) for k in sorted(params) for i in range(params[k].size)]
    rng = np.random.default_rng(seed)
    if len(entries) > n_entries:
        pick = rng.choice(len(entries), size=n_entries, replace=False)
        entries = [entries[i] for i in sorted(pick)]
    worst = 0.0
    for k, i in entries:
        flat = params[k].reshape(-1)
        orig = flat[i]
        flat[i] = orig + h
        lp = model.loss(params, y, idx, sample_weight)
        flat[i] = orig - h
        lm = model.loss(params, y, idx, sample_weight)
        flat[i] = orig
        num = (lp - lm) / (2 * h)
        ana = grads[k].reshape(-1)[i]
        worst = max(worst, abs(ana - num) / max(abs(ana), abs(num), floor))
    return worst
