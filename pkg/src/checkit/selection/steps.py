"""Five-step feature selection with a full audit trail.

1. drop features with too many missing values (then mean-impute the rest)
2. drop single-valued features
3. drop one feature of every highly correlated pair
4. drop features a boosted tree ensemble never splits on
5. drop the low-importance tail outside a cumulative importance mass

PCA explained variance is reported alongside as a diagnostic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from ..text.catalog import FeatureCatalog
from .gbdt import GBDTConfig, split_gain_importance

LABEL_CODES = {"credible": 0, "real": 0, "fake": 1}


class SelectionError(ValueError):
    pass


@dataclass
class FeatureMatrix:
    """Rows are articles, columns follow ``catalog``. NaN marks a missing value.

    ``ids`` holds each column's id in the original (pre-selection) catalog.
    """

    catalog: FeatureCatalog
    X: np.ndarray
    y: np.ndarray
    ids: np.ndarray = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim != 2 or self.X.shape[1] != len(self.catalog):
            raise SelectionError("matrix width does not match the catalog")
        y = np.asarray(self.y)
        if y.dtype.kind in "US" or y.dtype == object:
            try:
                y = np.array([LABEL_CODES[v] for v in y])
            except KeyError as exc:
                raise SelectionError(f"unknown label {exc.args[0]!r}") from None
        self.y = y.astype(np.int64)
        if len(self.y) != len(self.X):
            raise SelectionError("every row needs a label")
        if self.ids is None:
            self.ids = np.arange(self.X.shape[1])
        self.ids = np.asarray(self.ids, dtype=np.int64)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def keep(self, cols: Sequence[int]) -> "FeatureMatrix":
        cols = list(cols)
        return FeatureMatrix(self.catalog.subset(cols, self.catalog.version), self.X[:, cols],
                             self.y, self.ids[cols])


def drop_missing(m: FeatureMatrix, threshold: float = 0.60):
    """Drop columns whose missing fraction exceeds ``threshold``; mean-impute the rest."""
    if not 0 < threshold <= 1:
        raise SelectionError("threshold must lie in (0, 1]")
    miss = np.isnan(m.X).mean(axis=0) if len(m.X) else np.zeros(m.n_features)
    drop = miss > threshold
    if drop.all():
        raise SelectionError("every feature exceeds the missing-value threshold")
    removed = [(int(m.ids[j]), float(miss[j])) for j in np.flatnonzero(drop)]
    out = m.keep(np.flatnonzero(~drop))
    X = out.X.copy()
    for j in range(X.shape[1]):
        col = X[:, j]
        nan = np.isnan(col)
        if nan.any():
            col[nan] = col[~nan].mean() if (~nan).any() else 0.0
    out.X = X
    return out, removed


def drop_single_unique(m: FeatureMatrix):
    """Drop columns with at most one distinct observed value."""
    drop = []
    for j in range(m.n_features):
        col = m.X[:, j]
        col = col[~np.isnan(col)]
        if len(np.unique(col)) <= 1:
            drop.append(j)
    keep = [j for j in range(m.n_features) if j not in set(drop)]
    return m.keep(keep), [int(m.ids[j]) for j in drop]


def pearson_matrix(X: np.ndarray) -> np.ndarray:
    Xc = X - X.mean(axis=0)
    norm = np.sqrt((Xc**2).sum(axis=0))
    norm[norm == 0] = 1.0
    Z = Xc / norm
    return np.clip(Z.T @ Z, -1.0, 1.0)


def drop_collinear(m: FeatureMatrix, r_threshold: float = 0.975):
    """For each pair with ``|r| > r_threshold`` drop the later column.

    Columns are scanned in ascending order; a dropped column no longer
    eliminates others. Returns ``(matrix, [(kept_id, dropped_id, r), ...])``.
    """
    if not 0 < r_threshold < 1:
        raise SelectionError("r_threshold must lie in (0, 1)")
    R = pearson_matrix(m.X)
    n = m.n_features
    dropped = np.zeros(n, dtype=bool)
    pairs = []
    for i in range(n):
        if dropped[i]:
            continue
        for j in range(i + 1, n):
            if not dropped[j] and abs(R[i, j]) > r_threshold:
                dropped[j] = True
                pairs.append((int(m.ids[i]), int(m.ids[j]), float(R[i, j])))
    return m.keep(np.flatnonzero(~dropped)), pairs


def gbdt_importance(m: FeatureMatrix, config: Optional[GBDTConfig] = None) -> dict[int, float]:
    """Normalized split-gain importance keyed by original feature id."""
    if len(np.unique(m.y)) < 2:
        raise SelectionError("importance needs both classes in the labels")
    imp = split_gain_importance(m.X, m.y, config, tie_keys=m.ids)
    return {int(i): float(v) for i, v in zip(m.ids, imp)}


def low_importance_filter(importance: dict[int, float], mass: float = 0.95):
    """Keep the shortest prefix (by descending importance, then id) reaching ``mass``."""
    order = sorted(importance, key=lambda k: (-importance[k], k))
    kept, total = [], 0.0
    for k in order:
        if total >= mass - 1e-12 or importance[k] <= 0:
            break
        kept.append(k)
        total += importance[k]
    kept_set = set(kept)
    return kept, [k for k in order if k not in kept_set]


def pca_variance_curve(X: np.ndarray, center: bool = True) -> np.ndarray:
    """Explained-variance ratios of the column covariance, descending."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] < 2:
        raise SelectionError("PCA needs at least two rows")
    Xc = X - X.mean(axis=0) if center else X
    cov = Xc.T @ Xc / (X.shape[0] - 1)
    eig = np.linalg.eigvalsh(cov)[::-1]
    eig = np.clip(eig, 0.0, None)
    total = eig.sum()
    return eig / total if total > 0 else np.zeros_like(eig)


@dataclass
class SelectionConfig:
    missing_threshold: float = 0.60
    r_threshold: float = 0.975
    importance_mass: float = 0.95
    top_k: int = 20
    gbdt: GBDTConfig = field(default_factory=GBDTConfig)


@dataclass
class SelectionReport:
    n_features: int
    removed_missing: list
    removed_single_unique: list
    removed_collinear: list
    importance: dict
    removed_zero_importance: list
    removed_low_importance: list
    cumulative_importance: list
    pca_variance_curve: list
    survivors: list
    final_catalog: FeatureCatalog
    final_ids: list

    def removal_sets(self) -> dict[str, list[int]]:
        return {
            "missing": [i for i, _ in self.removed_missing],
            "single_unique": list(self.removed_single_unique),
            "collinear": [d for _, d, _ in self.removed_collinear],
            "zero_importance": list(self.removed_zero_importance),
            "low_importance": list(self.removed_low_importance),
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_features": self.n_features,
            "removed_missing": [{"id": i, "missing_fraction": f} for i, f in self.removed_missing],
            "removed_single_unique": self.removed_single_unique,
            "removed_collinear": [{"kept": k, "dropped": d, "r": r} for k, d, r in self.removed_collinear],
            "importance": {str(k): v for k, v in sorted(self.importance.items())},
            "removed_zero_importance": self.removed_zero_importance,
            "removed_low_importance": self.removed_low_importance,
            "cumulative_importance": self.cumulative_importance,
            "pca_variance_curve": self.pca_variance_curve,
            "survivors": self.survivors,
            "final_catalog": [
                {"id": i, "original_id": oid, "name": d.name, "scope": d.scope, "kind": d.kind,
                 "importance": self.importance[oid]}
                for i, (d, oid) in enumerate(zip(self.final_catalog, self.final_ids))
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def run_selection(m: FeatureMatrix, config: Optional[SelectionConfig] = None) -> SelectionReport:
    """Apply the five selection steps in order and rank the survivors."""
    cfg = config or SelectionConfig()
    if m.X.size == 0:
        raise SelectionError("empty feature matrix")
    original = m.catalog
    position = {int(i): p for p, i in enumerate(m.ids)}
    n0 = m.n_features
    m1, missing = drop_missing(m, cfg.missing_threshold)
    m2, single = drop_single_unique(m1)
    if m2.n_features == 0:
        raise SelectionError("no features left after removing single-valued columns")
    m3, collinear = drop_collinear(m2, cfg.r_threshold)
    importance = gbdt_importance(m3, cfg.gbdt)
    zero = sorted(k for k, v in importance.items() if v == 0.0)
    nonzero = {k: v for k, v in importance.items() if v > 0.0}
    kept, low = low_importance_filter(nonzero, cfg.importance_mass)
    ranked = sorted(importance, key=lambda k: (-importance[k], k))
    cum = np.cumsum([importance[k] for k in ranked]).tolist()
    survivors = sorted(kept, key=lambda k: (-importance[k], k))
    final_ids = survivors[: cfg.top_k]
    return SelectionReport(
        n_features=n0,
        removed_missing=missing,
        removed_single_unique=single,
        removed_collinear=collinear,
        importance=importance,
        removed_zero_importance=zero,
        removed_low_importance=sorted(low),
        cumulative_importance=cum,
        pca_variance_curve=pca_variance_curve(m3.X).tolist(),
        survivors=survivors,
        final_catalog=original.subset([position[i] for i in final_ids], version="selected"),
        final_ids=final_ids,
    )
