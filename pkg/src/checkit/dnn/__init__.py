"""Bottleneck neural classifier, training protocol and threshold calibration."""

from .calibration import THRESHOLD_GRID, ThresholdReport, calibrate_threshold, sweep_scores
from .model import (
    HIDDEN, ModelError, ModelParams, PredictionResult, backward, cross_entropy, fit_scaler,
    forward, init_model, loss_and_grads, one_hot, predict,
)
from .serialize import FormatVersionError, ShapeError, deserialize_model, serialize_model
from .training import (
    Adam, History, TrainingConfig, TrainingError, confusion, cross_validate, evaluate,
    gradient_check, metrics_from_confusion, stratified_holdout, stratified_kfold, train,
)

__all__ = [
    "Adam", "FormatVersionError", "HIDDEN", "History", "ModelError", "ModelParams",
    "PredictionResult", "ShapeError", "THRESHOLD_GRID", "ThresholdReport", "TrainingConfig",
    "TrainingError", "backward", "calibrate_threshold", "confusion", "cross_entropy",
    "cross_validate", "deserialize_model", "evaluate", "fit_scaler", "forward",
    "gradient_check", "init_model", "loss_and_grads", "metrics_from_confusion", "one_hot",
    "predict", "serialize_model", "stratified_holdout", "stratified_kfold", "sweep_scores",
    "train",
]
