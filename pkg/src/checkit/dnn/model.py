"""Bottleneck feedforward classifier: scaler, batch norm, tanh dense stack, softmax.

All arithmetic is float64. Dense weights are stored ``(fan_in, fan_out)`` so a
layer computes ``h @ W + b``.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

HIDDEN = (512, 256, 128, 64, 32)
N_CLASSES = 2
FORMAT_VERSION = 1
BN_EPS = 1e-5
BN_MOMENTUM = 0.9


class ModelError(ValueError):
    pass


@dataclass
class ModelParams:
    input_dim: int
    scaler_mean: np.ndarray
    scaler_std: np.ndarray
    bn_gamma: np.ndarray
    bn_beta: np.ndarray
    bn_mean: np.ndarray
    bn_var: np.ndarray
    weights: list = field(default_factory=list)
    biases: list = field(default_factory=list)
    bn_eps: float = BN_EPS
    bn_momentum: float = BN_MOMENTUM
    format_version: int = FORMAT_VERSION

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(w.shape[1] for w in self.weights)

    @property
    def hidden(self) -> tuple[int, ...]:
        return self.widths[:-1]

    def copy(self) -> "ModelParams":
        return copy.deepcopy(self)

    def param_groups(self) -> dict[str, np.ndarray]:
        """Trainable arrays by name (views, not copies)."""
        groups = {"bn_gamma": self.bn_gamma, "bn_beta": self.bn_beta}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            groups[f"W{i}"] = w
            groups[f"b{i}"] = b
        return groups

    def validate(self) -> None:
        d = self.input_dim
        for name in ("scaler_mean", "scaler_std", "bn_gamma", "bn_beta", "bn_mean", "bn_var"):
            if getattr(self, name).shape != (d,):
                raise ModelError(f"{name} has shape {getattr(self, name).shape}, expected ({d},)")
        fan_in = d
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or w.shape[0] != fan_in or b.shape != (w.shape[1],):
                raise ModelError(f"layer {i} shape {w.shape}/{b.shape} breaks the chain at width {fan_in}")
            fan_in = w.shape[1]
        if not self.weights or fan_in != N_CLASSES:
            raise ModelError("output layer must have 2 units")
        for name, arr in self.all_arrays().items():
            if not np.all(np.isfinite(arr)):
                raise ModelError(f"non-finite values in {name}")
        if np.any(self.bn_var <= 0):
            raise ModelError("running variance must be positive")
        if np.any(self.scaler_std <= 0):
            raise ModelError("scaler std must be positive")

    def all_arrays(self) -> dict[str, np.ndarray]:
        out = {
            "scaler_mean": self.scaler_mean, "scaler_std": self.scaler_std,
            "bn_mean": self.bn_mean, "bn_var": self.bn_var,
        }
        out.update(self.param_groups())
        return out


def init_model(input_dim: int, seed: int = 0, hidden=HIDDEN) -> ModelParams:
    """Fan-in scaled uniform (Glorot) weights, zero biases, identity batch norm."""
    if input_dim < 1:
        raise ModelError("input_dim must be >= 1")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    fan_in = input_dim
    for width in tuple(hidden) + (N_CLASSES,):
        limit = np.sqrt(6.0 / (fan_in + width))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, width)))
        biases.append(np.zeros(width))
        fan_in = width
    d = input_dim
    return ModelParams(
        input_dim=d,
        scaler_mean=np.zeros(d), scaler_std=np.ones(d),
        bn_gamma=np.ones(d), bn_beta=np.zeros(d),
        bn_mean=np.zeros(d), bn_var=np.ones(d),
        weights=weights, biases=biases,
    )


def fit_scaler(model: ModelParams, X: np.ndarray) -> None:
    """Store per-feature mean/std of ``X`` (training split only); zero std becomes 1."""
    model.scaler_mean = X.mean(axis=0)
    std = X.std(axis=0)
    model.scaler_std = np.where(std > 0, std, 1.0)


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass
class ForwardCache:
    xhat: np.ndarray
    activations: list
    probs: np.ndarray


def forward(model: ModelParams, X: np.ndarray, mode: str = "infer", *,
            update_stats: bool = True, return_cache: bool = False):
    """Class probabilities ``[p_real, p_fake]`` for each row of ``X``.

    In ``train`` mode batch norm normalizes with the batch statistics and,
    when ``update_stats`` is set, moves the running statistics by
    ``bn_momentum``. ``infer`` mode uses the running statistics.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.input_dim:
        raise ModelError(f"expected {model.input_dim} features, got {X.shape[1]}")
    x0 = (X - model.scaler_mean) / model.scaler_std
    if mode == "train":
        if len(X) < 2:
            raise ModelError("train mode needs a batch of at least 2 rows")
        mu = x0.mean(axis=0)
        var = x0.var(axis=0)
        if update_stats:
            m = model.bn_momentum
            model.bn_mean = m * model.bn_mean + (1 - m) * mu
            model.bn_var = m * model.bn_var + (1 - m) * var
    elif mode == "infer":
        mu, var = model.bn_mean, model.bn_var
    else:
        raise ModelError(f"unknown mode {mode!r}")
    xhat = (x0 - mu) / np.sqrt(var + model.bn_eps)
    h = model.bn_gamma * xhat + model.bn_beta
    acts = [h]
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        h = z if i == last else np.tanh(z)
        acts.append(h)
    probs = softmax(acts[-1])
    if return_cache:
        return probs, ForwardCache(xhat, acts, probs)
    return probs


def cross_entropy(probs: np.ndarray, y: np.ndarray, sample_weight=None) -> float:
    p = np.clip(probs[np.arange(len(y)), y], 1e-300, None)
    w = np.ones(len(y)) if sample_weight is None else sample_weight
    return float(-(w * np.log(p)).sum() / w.sum())


def backward(model: ModelParams, cache: ForwardCache, y: np.ndarray, sample_weight=None) -> dict[str, np.ndarray]:
    """Gradients of the (weighted) mean cross-entropy w.r.t. every trainable group."""
    n = len(y)
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    delta = cache.probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta *= (w / w.sum())[:, None]
    grads = {}
    acts = cache.activations
    for i in range(len(model.weights) - 1, -1, -1):
        grads[f"W{i}"] = acts[i].T @ delta
        grads[f"b{i}"] = delta.sum(axis=0)
        delta = delta @ model.weights[i].T
        if i > 0:
            delta *= 1.0 - acts[i] ** 2
    # delta is now d loss / d (batch norm output)
    grads["bn_gamma"] = (delta * cache.xhat).sum(axis=0)
    grads["bn_beta"] = delta.sum(axis=0)
    return grads


def loss_and_grads(model: ModelParams, X, y, mode: str = "train", sample_weight=None, update_stats: bool = True):
    probs, cache = forward(model, X, mode, update_stats=update_stats, return_cache=True)
    return cross_entropy(probs, y, sample_weight), backward(model, cache, y, sample_weight), probs


@dataclass(frozen=True)
class PredictionResult:
    p_real: float
    p_fake: float
    label: str


def predict(model: ModelParams, X: np.ndarray, threshold: float = 0.5) -> list[PredictionResult]:
    """Probabilities with a label; ``fake`` iff ``p_fake >= threshold``.

    Below the threshold the label is ``real`` when ``p_real`` is the larger
    probability and ``unverified`` otherwise (confident-only labelling).
    """
    probs = forward(model, X, "infer")
    out = []
    for p_real, p_fake in probs:
        if p_fake >= threshold:
            label = "fake"
        elif p_real >= p_fake:
            label = "real"
        else:
            label = "unverified"
        out.append(PredictionResult(float(p_real), float(p_fake), label))
    return out


def one_hot(values, categories=None) -> tuple[np.ndarray, list]:
    """One-hot encode a categorical column; returns ``(matrix, categories)``."""
    values = list(values)
    cats = sorted(set(values), key=str) if categories is None else list(categories)
    index = {c: i for i, c in enumerate(cats)}
    out = np.zeros((len(values), len(cats)))
    for r, v in enumerate(values):
        if v in index:
            out[r, index[v]] = 1.0
    return out, cats
