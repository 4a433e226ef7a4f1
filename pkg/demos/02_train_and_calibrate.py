"""Train the bottleneck classifier on synthetic data and pick a confident threshold."""

# %% Two overlapping Gaussian classes in 20 dimensions
import numpy as np

from checkit.dnn import (
    TrainingConfig, calibrate_threshold, deserialize_model, evaluate, forward, serialize_model,
    stratified_holdout, train,
)

rng = np.random.default_rng(0)
y = np.arange(2000) % 2
X = rng.normal(size=(2000, 20)) + np.where(y[:, None] == 1, 0.5, -0.5)

# %% Hold out a test split; training carves its own validation split for early stopping
train_idx, test_idx = stratified_holdout(y, 0.25, seed=1)
model, hist = train(X[train_idx], y[train_idx], TrainingConfig(seed=0))
print(f"stopped at epoch {hist.stopped_epoch}, best epoch {hist.best_epoch}")
print(f"best validation accuracy {hist.val_accuracy[hist.best_epoch - 1]:.3f}")

# %% Metrics at the default 0.5 cut
m = evaluate(model, X[test_idx], y[test_idx])
print({k: round(m[k], 3) for k in ("accuracy", "precision", "recall", "f1")})

# %% Sweep the fake-probability threshold; fewer false positives as it rises
report = calibrate_threshold(model, X[test_idx], y[test_idx])
for t, fp, tn, tp, fn in list(report.rows())[::7]:
    print(f"tau={t:.2f}  FP={fp:3d}  TN={tn:3d}  TP={tp:3d}")
print("chosen threshold:", report.chosen)

# %% The model file round-trips losslessly
blob = serialize_model(model)
again = deserialize_model(blob)
print(len(blob), "bytes;", "identical outputs:", np.array_equal(forward(model, X[:5]), forward(again, X[:5])))
