"""Feature preprocessing: z-score normalization and ReliefF relevance
weighting for ranking predictors before training."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .data_pipeline import LabeledDataset, NormalizationStats

_MIN_STDDEV = 1e-12


def fit_normalization(features: np.ndarray, feature_names) -> NormalizationStats:
    """Compute per-feature mean and population stddev for z-scoring."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] < 1:
        raise ValueError("features must be a non-empty 2-D array")
    names = tuple(feature_names)
    if len(names) != features.shape[1]:
        raise ValueError("feature_names length does not match feature count")
    mean = features.mean(axis=0)
    stddev = features.std(axis=0)
    flat = np.flatnonzero(stddev <= _MIN_STDDEV)
    if flat.size:
        bad = ", ".join(names[i] for i in flat)
        raise ValueError(f"cannot normalize constant feature(s): {bad}")
    return NormalizationStats(feature_names=names, mean=mean, stddev=stddev)


def apply_normalization(features: np.ndarray, stats: NormalizationStats) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != len(stats.feature_names):
        raise ValueError("features do not match the normalization stats")
    return (features - stats.mean) / stats.stddev


def normalize_dataset(
    dataset: LabeledDataset, stats: NormalizationStats | None = None
) -> LabeledDataset:
    """Return a z-scored copy of the dataset.

    With stats=None the statistics are fit on this dataset (training use);
    passing stats from the training split applies them unchanged (test use).
    """
    if dataset.normalized:
        raise ValueError("dataset is already normalized")
    if stats is None:
        stats = fit_normalization(dataset.features, dataset.feature_names)
    elif stats.feature_names != dataset.feature_names:
        raise ValueError(
            "normalization stats were fit on different features: "
            f"{stats.feature_names} vs {dataset.feature_names}"
        )
    return replace(
        dataset,
        features=apply_normalization(dataset.features, stats),
        normalized=True,
        normalization=stats,
    )


def relieff_weights(
    features: np.ndarray,
    labels: np.ndarray,
    k: int = 10,
    sample_count: int | None = None,
    seed: int = 0,
) -> np.ndarray:
    """ReliefF relevance weight per feature, each in [-1, 1].

    For every instance (or a seeded subsample of sample_count instances) the
    k nearest same-class hits and k nearest misses per other class are found
    by Manhattan distance; per-feature differences are range-scaled, hits
    subtract, misses add with prior weight P(miss class) / (1 - P(own class)).
    Neighbor ties break toward the lower row index. Higher weight means the
    feature separates classes better; a pure-noise feature trends negative.
    """
    X = np.ascontiguousarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2:
        raise ValueError("features must be 2-D")
    n, n_features = X.shape
    if y.shape != (n,):
        raise ValueError("labels length does not match feature rows")
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < 2:
        raise ValueError("ReliefF needs at least 2 instances")

    span = X.max(axis=0) - X.min(axis=0)
    span = np.where(span > 0, span, 1.0)  # constant feature: diffs are 0 anyway
    classes, counts = np.unique(y, return_counts=True)
    prior = counts / n

    if sample_count is None or sample_count >= n:
        picked = np.arange(n)
    else:
        if sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        picked = np.random.default_rng(seed).choice(n, size=sample_count, replace=False)

    class_rows = {int(c): np.flatnonzero(y == c) for c in classes}
    weights = np.zeros(n_features)
    m = len(picked)
    for i in picked:
        dist = np.abs(X - X[i]).sum(axis=1)
        for ci, c in enumerate(classes):
            rows = class_rows[int(c)]
            if c == y[i]:
                rows = rows[rows != i]
                if rows.size == 0:
                    continue  # singleton class: no hit term
                near = rows[np.argsort(dist[rows], kind="stable")[:k]]
                scale = -1.0
            else:
                near = rows[np.argsort(dist[rows], kind="stable")[:k]]
                scale = prior[ci] / (1.0 - prior[np.searchsorted(classes, y[i])])
            diffs = np.abs(X[near] - X[i]) / span
            weights += scale * diffs.sum(axis=0) / (m * near.size)
    return weights


def rank_features(weights: np.ndarray, feature_names) -> tuple[str, ...]:
    """Feature names sorted by descending weight; ties keep column order."""
    names = tuple(feature_names)
    if len(names) != len(weights):
        raise ValueError("weights length does not match feature_names")
    order = np.argsort(-np.asarray(weights, dtype=np.float64), kind="stable")
    return tuple(names[i] for i in order)
