"""Shared constructors for test fixtures."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from checkit.dnn.model import BN_EPS, ModelParams
from checkit.ingest import parse_resource
from checkit.pipeline import pack_resources


def two_gaussians(n=2000, d=20, shift=0.5, seed=0):
    """Balanced classes with means at -shift and +shift in every dimension."""
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    X = rng.normal(size=(n, d)) + np.where(y[:, None] == 1, shift, -shift)
    return X, y


def probe_model(input_dim, feature, points):
    """One-unit network reading a single feature.

    ``points`` is ``((x1, p1), (x2, p2))``: feature value ``x1`` yields
    ``p_fake == p1`` and ``x2`` yields ``p2`` (up to rounding).
    """
    (x1, p1), (x2, p2) = points
    w0 = np.zeros((input_dim, 1))
    w0[feature, 0] = 1.0
    var = np.ones(input_dim) - BN_EPS
    scale = np.sqrt(var[feature] + BN_EPS)
    h1, h2 = np.tanh(x1 / scale), np.tanh(x2 / scale)
    l1, l2 = np.log(p1 / (1 - p1)), np.log(p2 / (1 - p2))
    a = (l1 - l2) / (h1 - h2)
    c = l1 - a * h1
    return ModelParams(
        input_dim=input_dim,
        scaler_mean=np.zeros(input_dim), scaler_std=np.ones(input_dim),
        bn_gamma=np.ones(input_dim), bn_beta=np.zeros(input_dim),
        bn_mean=np.zeros(input_dim), bn_var=var,
        weights=[w0, np.array([[0.0, a]])],
        biases=[np.zeros(1), np.array([0.0, c])],
    )


def selection_matrix(n=2000, seed=7):
    """30 columns: 6 informative, 2 constant (ids 2, 7), 2 duplicates (5 of 1, 11 of 3), 20 noise."""
    rng = np.random.default_rng(seed)
    informative = [0, 1, 3, 4, 6, 8]
    X = rng.normal(size=(n, 30))
    coefs = np.array([2.0, -1.5, 1.8, 1.2, -2.2, 1.6])
    logit = X[:, informative] @ coefs
    y = (logit + 0.3 * rng.normal(size=n) > 0).astype(int)
    X[:, 2] = 7.0
    X[:, 7] = -1.0
    X[:, 5] = X[:, 1]
    X[:, 11] = X[:, 3]
    noise = [j for j in range(30) if j not in informative + [2, 7, 5, 11]]
    return X, y, informative, noise


PIPELINE_DATA = Path(__file__).parent / "data" / "pipeline"
UPPERCASE_HEADLINE = 2  # position in the top-20 catalog


def fixture_model():
    """All-caps headline gives p_fake 0.995, an all-lowercase one 0.3."""
    return probe_model(20, UPPERCASE_HEADLINE, ((1.0, 0.995), (0.0, 0.3)))


def fixture_resources():
    """Positional arguments for package building, read from the fixture files."""
    def load(kind, name):
        return parse_resource(kind, (PIPELINE_DATA / name).read_bytes())
    return ([load("flaglist", "flaglist.csv")], load("factchecks", "factchecks.jsonl"),
            load("blacklist", "blacklist.jsonl"), fixture_model())


def fixture_articles():
    return parse_resource("articles", (PIPELINE_DATA / "articles.jsonl").read_bytes())


def build_fixture_package(out_dir):
    return pack_resources(out_dir, *fixture_resources(), threshold=0.99, created_at="2020-01-01T00:00:00+00:00")
