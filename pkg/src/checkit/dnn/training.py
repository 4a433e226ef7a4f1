"""Mini-batch Adam training with early stopping, stratified folds and metrics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .model import (
    HIDDEN, ModelError, ModelParams, cross_entropy, fit_scaler, forward, init_model,
    loss_and_grads,
)

log = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    pass


@dataclass
class TrainingConfig:
    max_epochs: int = 100
    batch_size: int = 128
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    patience: int = 10
    validation_fraction: float = 0.1
    folds: int = 3
    seed: int = 0
    hidden: tuple = HIDDEN
    bn_momentum: float = 0.9
    class_weight: Optional[str] = None  # None or "balanced"
    # epoch (1-based) -> learning rate; overrides learning_rate when given
    lr_schedule: Optional[Callable[[int], float]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if not 0 <= self.validation_fraction < 1:
            raise ValueError("validation_fraction must lie in [0, 1)")
        if self.class_weight not in (None, "balanced"):
            raise ValueError("class_weight must be None or 'balanced'")


class Adam:
    def __init__(self, params: dict[str, np.ndarray], lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        """Update ``params`` in place."""
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1 - b1**self.t
        c2 = 1 - b2**self.t
        for k, p in params.items():
            g = grads[k]
            self.m[k] = b1 * self.m[k] + (1 - b1) * g
            self.v[k] = b2 * self.v[k] + (1 - b2) * g * g
            p -= self.lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)


@dataclass
class History:
    train_loss: list = field(default_factory=list)
    train_accuracy: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    val_accuracy: list = field(default_factory=list)
    best_epoch: int = 0
    stopped_epoch: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _sample_weights(y: np.ndarray, mode: Optional[str]) -> Optional[np.ndarray]:
    if mode is None:
        return None
    counts = np.bincount(y, minlength=2).astype(np.float64)
    per_class = len(y) / (2.0 * np.where(counts > 0, counts, 1.0))
    return per_class[y]


def _check_labels(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y).astype(np.int64)
    if set(np.unique(y)) - {0, 1}:
        raise TrainingError("labels must be 0 (real) or 1 (fake)")
    if len(np.unique(y)) < 2:
        raise TrainingError("training needs both classes")
    return y


def stratified_holdout(y: np.ndarray, fraction: float, seed: int = 0):
    """Split indices into ``(train, validation)`` keeping class proportions."""
    rng = np.random.default_rng(seed)
    train, val = [], []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(len(idx))]
        k = int(round(fraction * len(idx)))
        k = min(max(k, 1), len(idx) - 1) if len(idx) > 1 else 0
        val.extend(idx[:k])
        train.extend(idx[k:])
    return np.sort(np.array(train, dtype=np.int64)), np.sort(np.array(val, dtype=np.int64))


def _batches(n: int, batch_size: int, rng) -> list[np.ndarray]:
    order = rng.permutation(n)
    batches = [order[i:i + batch_size] for i in range(0, n, batch_size)]
    # batch norm needs >= 2 rows in train mode
    if len(batches) > 1 and len(batches[-1]) < 2:
        batches[-2] = np.concatenate([batches[-2], batches.pop()])
    return batches


def _accuracy(probs: np.ndarray, y: np.ndarray) -> float:
    return float((probs.argmax(axis=1) == y).mean())


def train(X: np.ndarray, y: np.ndarray, config: Optional[TrainingConfig] = None,
          X_val: Optional[np.ndarray] = None, y_val: Optional[np.ndarray] = None):
    """Fit a fresh model; returns ``(best ModelParams, History)``.

    Without explicit validation data a stratified holdout of
    ``validation_fraction`` is carved from ``X``. With no validation data at
    all (fraction 0) the model of the final epoch is returned.
    """
    cfg = config or TrainingConfig()
    X = np.asarray(X, dtype=np.float64)
    y = _check_labels(y)
    if len(X) < 2:
        raise TrainingError("need at least 2 training rows")
    if X_val is None and cfg.validation_fraction > 0:
        tr, va = stratified_holdout(y, cfg.validation_fraction, cfg.seed)
        X, X_val, y, y_val = X[tr], X[va], y[tr], y[va]
    if X_val is not None:
        X_val = np.asarray(X_val, dtype=np.float64)
        y_val = np.asarray(y_val).astype(np.int64)

    model = init_model(X.shape[1], seed=cfg.seed, hidden=cfg.hidden)
    model.bn_momentum = cfg.bn_momentum
    fit_scaler(model, X)
    params = model.param_groups()
    opt = Adam(params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps)
    rng = np.random.default_rng(cfg.seed + 1)
    weights = _sample_weights(y, cfg.class_weight)

    hist = History()
    best_loss, best_model, wait = np.inf, model.copy(), 0
    for epoch in range(1, cfg.max_epochs + 1):
        opt.lr = cfg.lr_schedule(epoch) if cfg.lr_schedule else cfg.learning_rate
        total, correct = 0.0, 0
        for bi, idx in enumerate(_batches(len(X), cfg.batch_size, rng)):
            sw = None if weights is None else weights[idx]
            loss, grads, probs = loss_and_grads(model, X[idx], y[idx], "train", sw)
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}, batch {bi}")
            opt.step(params, grads)
            total += loss * len(idx)
            correct += int((probs.argmax(axis=1) == y[idx]).sum())
        hist.train_loss.append(total / len(X))
        hist.train_accuracy.append(correct / len(X))
        hist.stopped_epoch = epoch
        if X_val is None:
            hist.best_epoch = epoch
            continue
        pv = forward(model, X_val, "infer")
        vloss = cross_entropy(pv, y_val)
        hist.val_loss.append(vloss)
        hist.val_accuracy.append(_accuracy(pv, y_val))
        if vloss < best_loss:
            best_loss, best_model, wait = vloss, model.copy(), 0
            hist.best_epoch = epoch
        else:
            wait += 1
            if wait >= cfg.patience:
                log.info("early stop at epoch %d (best %d)", epoch, hist.best_epoch)
                break
    if X_val is None:
        return model, hist
    return best_model, hist


def stratified_kfold(labels, k: int = 3, seed: int = 0) -> np.ndarray:
    """Fold index (``0..k-1``) per sample; per-class fold sizes differ by at most 1."""
    y = np.asarray(labels)
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    folds = np.empty(len(y), dtype=np.int64)
    offset = 0
    for cls in sorted(np.unique(y).tolist()):
        idx = np.flatnonzero(y == cls)
        if len(idx) < k:
            raise ValueError(f"class {cls!r} has {len(idx)} members, fewer than k={k}")
        idx = idx[rng.permutation(len(idx))]
        # rotate the starting fold so remainders spread across folds
        folds[idx] = (np.arange(len(idx)) + offset) % k
        offset = (offset + len(idx)) % k
    return folds


def confusion(y_true: np.ndarray, y_pred: np.ndarray) -> dict[str, int]:
    """Counts with fake (1) as the positive class."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    return {
        "tp": int(((y_true == 1) & (y_pred == 1)).sum()),
        "fp": int(((y_true == 0) & (y_pred == 1)).sum()),
        "fn": int(((y_true == 1) & (y_pred == 0)).sum()),
        "tn": int(((y_true == 0) & (y_pred == 0)).sum()),
    }


def metrics_from_confusion(c: dict[str, int]) -> dict[str, float]:
    tp, fp, fn, tn = c["tp"], c["fp"], c["fn"], c["tn"]
    n = tp + fp + fn + tn

    def ratio(a, b):
        return a / b if b else 0.0

    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)
    f1 = ratio(2 * precision * recall, precision + recall)
    # same quantities with real as the positive class, for macro averages
    p_neg = ratio(tn, tn + fn)
    r_neg = ratio(tn, tn + fp)
    f1_neg = ratio(2 * p_neg * r_neg, p_neg + r_neg)
    return {
        "accuracy": ratio(tp + tn, n),
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "macro_precision": (precision + p_neg) / 2,
        "macro_recall": (recall + r_neg) / 2,
        "macro_f1": (f1 + f1_neg) / 2,
    }


def evaluate(model: ModelParams, X: np.ndarray, y: np.ndarray, threshold: float = 0.5) -> dict:
    """Metrics at ``threshold``; a row is called fake iff ``p_fake >= threshold``."""
    y = np.asarray(y).astype(np.int64)
    p_fake = forward(model, X, "infer")[:, 1]
    pred = (p_fake >= threshold).astype(np.int64)
    c = confusion(y, pred)
    out = metrics_from_confusion(c)
    out["confusion"] = c
    out["threshold"] = threshold
    return out


def cross_validate(X: np.ndarray, y: np.ndarray, config: Optional[TrainingConfig] = None,
                   threshold: float = 0.5) -> dict:
    """Stratified k-fold: train on k-1 folds, evaluate on the held-out fold."""
    cfg = config or TrainingConfig()
    y = _check_labels(y)
    folds = stratified_kfold(y, cfg.folds, cfg.seed)
    per_fold = []
    for f in range(cfg.folds):
        tr, te = folds != f, folds == f
        model, _ = train(X[tr], y[tr], cfg)
        per_fold.append(evaluate(model, X[te], y[te], threshold))
    keys = ["accuracy", "precision", "recall", "f1", "macro_precision", "macro_recall", "macro_f1"]
    mean = {k: float(np.mean([m[k] for m in per_fold])) for k in keys}
    return {"folds": per_fold, "mean": mean}


def _relative_error(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
    if scale < 1e-12:
        return 0.0
    return float(np.abs(a - b).max() / scale)


def gradient_check(model: ModelParams, X: np.ndarray, y: np.ndarray, mode: str = "infer",
                   h: float = 1e-5, grad_fn=None) -> float:
    """Max relative error between analytic and central-difference gradients.

    The error of each parameter group is ``max|a - n| / max(max|a|, max|n|)``
    and the worst group is returned. ``grad_fn(model, X, y, mode)`` may replace
    the analytic gradient, e.g. to verify that a broken gradient is caught.
    Running statistics are never updated during the check.
    """
    y = np.asarray(y).astype(np.int64)
    if grad_fn is None:
        def grad_fn(m, X_, y_, mode_):
            return loss_and_grads(m, X_, y_, mode_, update_stats=False)[1]
    analytic = grad_fn(model, X, y, mode)

    def loss() -> float:
        return cross_entropy(forward(model, X, mode, update_stats=False), y)

    worst = 0.0
    for name, p in model.param_groups().items():
        num = np.zeros_like(p)
        flat, gflat = p.reshape(-1), num.reshape(-1)
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + h
            up = loss()
            flat[i] = old - h
            down = loss()
            flat[i] = old
            gflat[i] = (up - down) / (2 * h)
        worst = max(worst, _relative_error(analytic[name], num))
    return worst


__all__ = [
    "Adam", "History", "ModelError", "TrainingConfig", "TrainingError", "confusion",
    "cross_validate", "evaluate", "gradient_check", "metrics_from_confusion",
    "stratified_holdout", "stratified_kfold", "train",
]
