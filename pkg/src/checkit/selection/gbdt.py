"""Small gradient-boosted tree ensemble on logistic loss, used for feature importance.

Trees are regression trees fit to the negative gradient with exact split
search; leaves take a single Newton step. Importance is the total
squared-error reduction contributed by each feature's splits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class GBDTConfig:
    trees: int = 50
    depth: int = 3
    learning_rate: float = 0.1
    min_samples_leaf: int = 1
    subsample: float = 1.0
    seed: int = 0


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    value: float = 0.0


@dataclass
class GBDTModel:
    base_score: float
    trees: list = field(default_factory=list)
    learning_rate: float = 0.1
    gains: np.ndarray = None

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        out = np.full(len(X), self.base_score)
        for tree in self.trees:
            out += self.learning_rate * _predict(tree, X)
        return out

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(-self.decision_function(X)))


def _predict(node: _Node, X: np.ndarray) -> np.ndarray:
    if node.left is None:
        return np.full(len(X), node.value)
    out = np.empty(len(X))
    mask = X[:, node.feature] <= node.threshold
    out[mask] = _predict(node.left, X[mask])
    out[~mask] = _predict(node.right, X[~mask])
    return out


def _best_split(X: np.ndarray, r: np.ndarray, min_leaf: int, keys: np.ndarray):
    """Best (gain, feature, threshold) by squared-error reduction.

    Ties on gain resolve to the smallest ``keys`` entry (a per-feature identity
    that moves with its column), then the lowest threshold.
    """
    n, d = X.shape
    total = r.sum()
    parent = total * total / n
    best = (0.0, -1, 0.0)
    best_key = None
    for j in range(d):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        cs = np.cumsum(r[order])[:-1]
        n_left = np.arange(1, n)
        # only cut between distinct values
        valid = xs[1:] > xs[:-1]
        valid &= (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not valid.any():
            continue
        gain = cs**2 / n_left + (total - cs) ** 2 / (n - n_left) - parent
        gain = np.where(valid, gain, -np.inf)
        k = int(np.argmax(gain))
        g = float(gain[k])
        if g <= 1e-12:
            continue
        if g > best[0] + 1e-12 or (g >= best[0] - 1e-12 and keys[j] < best_key):
            best = (g, j, float(0.5 * (xs[k] + xs[k + 1])))
            best_key = keys[j]
    return best


def _grow(X, r, hess, depth, cfg, gains, keys) -> _Node:
    node = _Node()
    h = hess.sum()
    node.value = float(r.sum() / h) if h > 1e-12 else 0.0
    if depth == 0 or len(r) < 2 * cfg.min_samples_leaf:
        return node
    gain, j, thr = _best_split(X, r, cfg.min_samples_leaf, keys)
    if j < 0:
        return node
    gains[j] += gain
    mask = X[:, j] <= thr
    node.feature, node.threshold = j, thr
    node.left = _grow(X[mask], r[mask], hess[mask], depth - 1, cfg, gains, keys)
    node.right = _grow(X[~mask], r[~mask], hess[~mask], depth - 1, cfg, gains, keys)
    return node


def fit_gbdt(X: np.ndarray, y: np.ndarray, config: GBDTConfig | None = None,
             tie_keys: np.ndarray | None = None) -> GBDTModel:
    """Boost ``config.trees`` trees; ``tie_keys`` (default: column index) orders equal-gain splits."""
    cfg = config or GBDTConfig()
    X = np.asarray(X, dtype=np.float64)
    keys = np.arange(X.shape[1]) if tie_keys is None else np.asarray(tie_keys)
    y = np.asarray(y, dtype=np.float64)
    if len(np.unique(y)) < 2:
        raise ValueError("gradient boosting needs at least two classes")
    rng = np.random.default_rng(cfg.seed)
    p0 = y.mean()
    model = GBDTModel(base_score=float(np.log(p0 / (1 - p0))), learning_rate=cfg.learning_rate,
                      gains=np.zeros(X.shape[1]))
    f = np.full(len(y), model.base_score)
    for _ in range(cfg.trees):
        p = 1.0 / (1.0 + np.exp(-f))
        r = y - p
        hess = p * (1 - p)
        if cfg.subsample < 1.0:
            idx = np.sort(rng.choice(len(y), size=max(2, int(cfg.subsample * len(y))), replace=False))
        else:
            idx = np.arange(len(y))
        tree = _grow(X[idx], r[idx], hess[idx], cfg.depth, cfg, model.gains, keys)
        model.trees.append(tree)
        f += cfg.learning_rate * _predict(tree, X)
    return model


def split_gain_importance(X: np.ndarray, y: np.ndarray, config: GBDTConfig | None = None,
                          tie_keys: np.ndarray | None = None) -> np.ndarray:
    """Normalized total split gain per column (all zeros if nothing was split)."""
    gains = fit_gbdt(X, y, config, tie_keys).gains
    total = gains.sum()
    return gains / total if total > 0 else gains
