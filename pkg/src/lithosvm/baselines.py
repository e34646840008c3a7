"""Gaussian Naive Bayes baseline classifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_pipeline import NormalizationStats
from .multiclass import lithology_class_names

VARIANCE_FLOOR = 1e-9


@dataclass
class GaussianNbModel:
    """Per-class priors and independent per-feature Gaussians.

    Evaluation happens in log space, so scoring stays finite arbitrarily far
    from the class means. Ties in the posterior go to the lowest class code.
    """

    classes: tuple[int, ...]
    class_names: tuple[str, ...]
    feature_names: tuple[str, ...]
    priors: np.ndarray  # (K,)
    means: np.ndarray  # (K, F)
    variances: np.ndarray  # (K, F), floored
    normalization: NormalizationStats | None = None

    def __post_init__(self) -> None:
        self.priors = np.asarray(self.priors, dtype=np.float64)
        self.means = np.asarray(self.means, dtype=np.float64)
        self.variances = np.asarray(self.variances, dtype=np.float64)
        k, f = len(self.classes), len(self.feature_names)
        if len(self.class_names) != k:
            raise ValueError("class_names length does not match classes")
        if self.priors.shape != (k,) or self.means.shape != (k, f) or self.variances.shape != (k, f):
            raise ValueError("priors/means/variances shapes do not match classes and features")
        if np.any(self.variances < VARIANCE_FLOOR):
            raise ValueError(f"variances must be floored at {VARIANCE_FLOOR}")


def train_gaussian_nb(
    features: np.ndarray,
    labels: np.ndarray,
    feature_names=None,
    classes=None,
    class_names=None,
    normalization: NormalizationStats | None = None,
) -> GaussianNbModel:
    """Maximum-likelihood fit: class frequencies, means, population variances."""
    X = np.ascontiguousarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("features must be 2-D with one label per row")
    if classes is None:
        classes = tuple(int(c) for c in np.unique(y))
    else:
        classes = tuple(int(c) for c in classes)
    names = tuple(feature_names) if feature_names is not None else tuple(
        f"f{i}" for i in range(X.shape[1])
    )
    if len(names) != X.shape[1]:
        raise ValueError("feature_names length does not match feature count")
    if class_names is None:
        class_names = lithology_class_names(classes)

    k = len(classes)
    priors = np.zeros(k)
    means = np.zeros((k, X.shape[1]))
    variances = np.zeros((k, X.shape[1]))
    for idx, c in enumerate(classes):
        rows = X[y == c]
        if len(rows) == 0:
            raise ValueError(f"class {c} has no training rows")
        priors[idx] = len(rows) / len(X)
        means[idx] = rows.mean(axis=0)
        variances[idx] = np.maximum(rows.var(axis=0), VARIANCE_FLOOR)
    return GaussianNbModel(
        classes=classes,
        class_names=tuple(class_names),
        feature_names=names,
        priors=priors,
        means=means,
        variances=variances,
        normalization=normalization,
    )


def log_joint(model: GaussianNbModel, features: np.ndarray) -> np.ndarray:
    """log P(class) + sum_f log N(x_f; mean, var), one column per class."""
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.means.shape[1]:
        raise ValueError("features do not match the model's feature count")
    out = np.empty((X.shape[0], len(model.classes)))
    for idx in range(len(model.classes)):
        var = model.variances[idx]
        delta = X - model.means[idx]
        out[:, idx] = (
            np.log(model.priors[idx])
            - 0.5 * np.sum(np.log(2.0 * np.pi * var))
            - np.sum(delta * delta / (2.0 * var), axis=1)
        )
    return out


def predict(model: GaussianNbModel, features: np.ndarray) -> np.ndarray:
    """Class code with the highest posterior; ties to the lowest code."""
    scores = log_joint(model, features)
    winners = np.argmax(scores, axis=1)
    return np.asarray(model.classes, dtype=np.int64)[winners]
