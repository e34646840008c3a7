"""One-against-all multiclass wrapper around the binary SVM."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_pipeline import CLASS_NAMES, NormalizationStats
from .kernels import KernelSpec, gram_matrix
from .solver import BinarySvmModel, SolverConfig, decision_function, train_binary_svm


@dataclass
class MulticlassSvmModel:
    """K binary models, one per class trained as +1 against the rest.

    Prediction is the argmax of the K raw decision values; exact ties go to
    the lowest class code. normalization, when present, is the z-score fit
    from training and must be applied to features before prediction.
    """

    classes: tuple[int, ...]
    class_names: tuple[str, ...]
    models: tuple[BinarySvmModel, ...]
    normalization: NormalizationStats | None = None

    def __post_init__(self) -> None:
        if len(self.classes) < 2:
            raise ValueError("a multiclass model needs at least 2 classes")
        if len(self.class_names) != len(self.classes):
            raise ValueError("class_names length does not match classes")
        if len(self.models) != len(self.classes):
            raise ValueError("one binary model per class required")
        if list(self.classes) != sorted(self.classes):
            raise ValueError("classes must be in ascending order")

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.models[0].feature_names


def lithology_class_names(classes) -> tuple[str, ...]:
    return tuple(CLASS_NAMES[c] if 0 <= c < len(CLASS_NAMES) else f"class{c}" for c in classes)


def train_one_vs_all(
    features: np.ndarray,
    labels: np.ndarray,
    config: SolverConfig,
    kernel: KernelSpec,
    feature_names=None,
    classes=None,
    class_names=None,
    normalization: NormalizationStats | None = None,
) -> MulticlassSvmModel:
    """Train K one-against-all binary SVMs over the label codes.

    classes defaults to the sorted distinct labels. The Gram matrix is
    computed once and shared by all K trainings, so the cost over a single
    binary fit is only the extra SMO iterations.
    """
    y = np.asarray(labels, dtype=np.int64)
    if classes is None:
        classes = tuple(int(c) for c in np.unique(y))
    else:
        classes = tuple(int(c) for c in classes)
        missing = set(y.tolist()) - set(classes)
        if missing:
            raise ValueError(f"labels contain codes outside classes: {sorted(missing)}")
    if class_names is None:
        class_names = lithology_class_names(classes)
    X = np.ascontiguousarray(features, dtype=np.float64)
    gram = gram_matrix(kernel, X)
    models = tuple(
        train_binary_svm(
            X,
            np.where(y == c, 1.0, -1.0),
            config,
            kernel,
            feature_names=feature_names,
            gram=gram,
        )
        for c in classes
    )
    return MulticlassSvmModel(
        classes=classes,
        class_names=tuple(class_names),
        models=models,
        normalization=normalization,
    )


def decision_matrix(model: MulticlassSvmModel, features: np.ndarray) -> np.ndarray:
    """Raw decision values, one column per class in model.classes order."""
    X = np.ascontiguousarray(features, dtype=np.float64)
    return np.column_stack([decision_function(m, X) for m in model.models])


def predict(model: MulticlassSvmModel, features: np.ndarray) -> np.ndarray:
    """Predicted class codes; argmax over decisions, ties to lowest code."""
    scores = decision_matrix(model, features)
    winners = np.argmax(scores, axis=1)  # first occurrence wins ties
    return np.asarray(model.classes, dtype=np.int64)[winners]
