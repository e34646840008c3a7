"""Evaluation: confusion matrices, accuracy, ordinal error structure, and
parameter/feature sweeps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import baselines, multiclass
from .data_pipeline import LabeledDataset
from .kernels import KernelSpec, rbf_kernel
from .preprocess import normalize_dataset
from .solver import SolverConfig


@dataclass
class ConfusionMatrix:
    """Raw prediction counts; rows are true classes, columns predictions."""

    classes: tuple[int, ...]
    class_names: tuple[str, ...]
    counts: np.ndarray  # (K, K) int64

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.classes)
        if self.counts.shape != (k, k):
            raise ValueError("counts must be square over the classes")
        if len(self.class_names) != k:
            raise ValueError("class_names length does not match classes")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion_matrix(y_true, y_pred, classes, class_names=None) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError("y_true and y_pred must be 1-D arrays of equal length")
    classes = tuple(int(c) for c in classes)
    index = {c: i for i, c in enumerate(classes)}
    unknown = (set(y_true.tolist()) | set(y_pred.tolist())) - set(classes)
    if unknown:
        raise ValueError(f"labels outside the class list: {sorted(unknown)}")
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        counts[index[int(t)], index[int(p)]] += 1
    if class_names is None:
        class_names = multiclass.lithology_class_names(classes)
    return ConfusionMatrix(classes=classes, class_names=tuple(class_names), counts=counts)


def accuracy(cm: ConfusionMatrix) -> float:
    """Correct predictions over all predictions: trace / total."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    return float(np.trace(cm.counts)) / cm.total


def row_normalize(cm: ConfusionMatrix) -> np.ndarray:
    """Per-true-class rates; rows with no samples come back as zeros."""
    counts = cm.counts.astype(np.float64)
    sums = counts.sum(axis=1, keepdims=True)
    return np.divide(counts, sums, out=np.zeros_like(counts), where=sums > 0)


def adjacency_violation_rate(cm: ConfusionMatrix) -> float:
    """Share of misclassifications landing 2+ ordinal steps from the truth.

    0.0 when there are no misclassifications at all.
    """
    k = len(cm.classes)
    off_diagonal = 0
    violations = 0
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            off_diagonal += int(cm.counts[i, j])
            if abs(i - j) >= 2:
                violations += int(cm.counts[i, j])
    if off_diagonal == 0:
        return 0.0
    return violations / off_diagonal


def format_confusion_csv(cm: ConfusionMatrix, normalized: bool = False) -> str:
    """CSV text: header row of predicted names, one row per true class."""
    lines = ["true\\pred," + ",".join(cm.class_names)]
    if normalized:
        rates = row_normalize(cm)
        for name, row in zip(cm.class_names, rates):
            lines.append(name + "," + ",".join(f"{v:.2f}" for v in row))
    else:
        for name, row in zip(cm.class_names, cm.counts):
            lines.append(name + "," + ",".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def _fit_eval(train: LabeledDataset, test: LabeledDataset, kernel: KernelSpec,
              config: SolverConfig, classes) -> float:
    model = multiclass.train_one_vs_all(
        train.features, train.labels, config, kernel,
        feature_names=train.feature_names, classes=classes,
    )
    predicted = multiclass.predict(model, test.features)
    return accuracy(confusion_matrix(test.labels, predicted, model.classes))


def _normalized_pair(train: LabeledDataset, test: LabeledDataset):
    if not train.normalized:
        train = normalize_dataset(train)
        test = normalize_dataset(test, train.normalization)
    elif not test.normalized:
        raise ValueError("train split is normalized but test split is not")
    return train, test


def sigma_sweep(
    train: LabeledDataset,
    test: LabeledDataset,
    sigmas,
    config: SolverConfig,
    classes=None,
) -> list[tuple[float, float]]:
    """Test accuracy of the RBF model at each bandwidth, as (sigma, accuracy).

    Splits are z-scored with training statistics unless already normalized.
    """
    train, test = _normalized_pair(train, test)
    rows = []
    for sigma in sigmas:
        rows.append((float(sigma), _fit_eval(train, test, rbf_kernel(float(sigma)), config, classes)))
    return rows


def feature_subset_sweep(
    train: LabeledDataset,
    test: LabeledDataset,
    subsets,
    kernel: KernelSpec,
    config: SolverConfig,
    classes=None,
) -> list[tuple[tuple[str, ...], float]]:
    """Test accuracy per feature subset, as (subset names, accuracy).

    Normalization is refit per subset on the training columns so each run
    sees properly scaled inputs.
    """
    if train.normalized or test.normalized:
        raise ValueError("feature_subset_sweep expects unnormalized splits")
    rows = []
    for subset in subsets:
        names = tuple(subset)
        sub_train, sub_test = _normalized_pair(
            train.select_features(names), test.select_features(names)
        )
        rows.append((names, _fit_eval(sub_train, sub_test, kernel, config, classes)))
    return rows
