"""Decision-threshold sweep minimizing false positives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, forward

# 0.50, 0.51, ..., 0.99
THRESHOLD_GRID = tuple(round(0.50 + 0.01 * k, 2) for k in range(50))


@dataclass
class ThresholdReport:
    grid: list
    false_positives: list
    true_negatives: list
    true_positives: list
    false_negatives: list
    chosen: float

    def rows(self):
        return zip(self.grid, self.false_positives, self.true_negatives,
                   self.true_positives, self.false_negatives)

    def to_dict(self) -> dict:
        return {
            "chosen_threshold": self.chosen,
            "curve": [
                {"threshold": t, "fp": fp, "tn": tn, "tp": tp, "fn": fn}
                for t, fp, tn, tp, fn in self.rows()
            ],
        }

    def to_csv(self) -> str:
        lines = ["threshold,fp,tn,tp,fn"]
        lines += [f"{t:.2f},{fp},{tn},{tp},{fn}" for t, fp, tn, tp, fn in self.rows()]
        return "\n".join(lines) + "\n"


def sweep_scores(p_fake: np.ndarray, y: np.ndarray, grid=THRESHOLD_GRID) -> ThresholdReport:
    """FP/TN (and TP/FN) per threshold for precomputed fake probabilities.

    The chosen threshold is the smallest grid value reaching the minimum
    false-positive count; the full curve is kept so other policies remain
    recoverable.
    """
    p_fake = np.asarray(p_fake, dtype=np.float64)
    y = np.asarray(y).astype(np.int64)
    real = y == 0
    fps, tns, tps, fns = [], [], [], []
    for t in grid:
        pred = p_fake >= t
        fps.append(int((pred & real).sum()))
        tns.append(int((~pred & real).sum()))
        tps.append(int((pred & ~real).sum()))
        fns.append(int((~pred & ~real).sum()))
    best = min(fps)
    chosen = next(t for t, fp in zip(grid, fps) if fp == best)
    return ThresholdReport(list(grid), fps, tns, tps, fns, float(chosen))


def calibrate_threshold(model: ModelParams, X: np.ndarray, y: np.ndarray) -> ThresholdReport:
    return sweep_scores(forward(model, X, "infer")[:, 1], y)
