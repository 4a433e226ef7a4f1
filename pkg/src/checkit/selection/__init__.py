"""Feature selection: missing/constant/collinear filters, boosted-tree importance, PCA diagnostic."""

from .gbdt import GBDTConfig, fit_gbdt, split_gain_importance
from .steps import (
    FeatureMatrix, SelectionConfig, SelectionError, SelectionReport, drop_collinear,
    drop_missing, drop_single_unique, gbdt_importance, low_importance_filter,
    pca_variance_curve, pearson_matrix, run_selection,
)

__all__ = [
    "FeatureMatrix", "GBDTConfig", "SelectionConfig", "SelectionError", "SelectionReport",
    "drop_collinear", "drop_missing", "drop_single_unique", "fit_gbdt", "gbdt_importance",
    "low_importance_filter", "pca_variance_curve", "pearson_matrix", "run_selection",
    "split_gain_importance",
]
