"""JSON persistence for trained models.

Floats are written through Python's shortest-round-trip repr, so a load
reproduces every value bit-for-bit; documents carry a format_version and a
model_type discriminator. Output is deterministic: fixed key order, indent 2,
no timestamps.
"""

from __future__ import annotations

import json

import numpy as np

from .baselines import GaussianNbModel
from .data_pipeline import NormalizationStats
from .kernels import KernelSpec
from .multiclass import MulticlassSvmModel
from .solver import BinarySvmModel

FORMAT_VERSION = 1

BINARY_SVM = "binary_svm"
ONE_VS_ALL_SVM = "one_vs_all_svm"
GAUSSIAN_NB = "gaussian_nb"


def _floats(values) -> list:
    return [float(v) for v in np.asarray(values, dtype=np.float64).ravel()]


def _float_rows(matrix) -> list[list[float]]:
    matrix = np.asarray(matrix, dtype=np.float64)
    return [[float(v) for v in row] for row in matrix]


def kernel_to_doc(spec: KernelSpec) -> dict:
    if spec.kind == "rbf":
        return {"kernel": "rbf", "sigma": float(spec.sigma)}
    return {"kernel": "linear"}


def kernel_from_doc(doc: dict) -> KernelSpec:
    kind = doc.get("kernel")
    if kind == "rbf":
        return KernelSpec(kind="rbf", sigma=float(doc["sigma"]))
    if kind == "linear":
        return KernelSpec(kind="linear", sigma=None)
    raise ValueError(f"unknown kernel document: {doc!r}")


def _normalization_to_doc(stats: NormalizationStats | None):
    if stats is None:
        return None
    return {
        "feature_names": list(stats.feature_names),
        "mean": _floats(stats.mean),
        "stddev": _floats(stats.stddev),
    }


def _normalization_from_doc(doc) -> NormalizationStats | None:
    if doc is None:
        return None
    return NormalizationStats(
        feature_names=tuple(doc["feature_names"]),
        mean=np.array(doc["mean"], dtype=np.float64),
        stddev=np.array(doc["stddev"], dtype=np.float64),
    )


def binary_svm_to_doc(model: BinarySvmModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "model_type": BINARY_SVM,
        "kernel": kernel_to_doc(model.kernel),
        "C": float(model.C),
        "bias": float(model.bias),
        "feature_names": list(model.feature_names),
        "support_vectors": _float_rows(model.support_vectors),
        "coefficients": _floats(model.coefficients),
    }


def binary_svm_from_doc(doc: dict) -> BinarySvmModel:
    _check_version(doc)
    names = tuple(doc["feature_names"])
    rows = doc["support_vectors"]
    support_vectors = np.array(rows, dtype=np.float64).reshape(len(rows), len(names))
    return BinarySvmModel(
        kernel=kernel_from_doc(doc["kernel"]),
        C=float(doc["C"]),
        bias=float(doc["bias"]),
        feature_names=names,
        support_vectors=support_vectors,
        coefficients=np.array(doc["coefficients"], dtype=np.float64),
    )


def multiclass_to_doc(model: MulticlassSvmModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "model_type": ONE_VS_ALL_SVM,
        "classes": [int(c) for c in model.classes],
        "class_names": list(model.class_names),
        "normalization": _normalization_to_doc(model.normalization),
        "models": [binary_svm_to_doc(m) for m in model.models],
    }


def multiclass_from_doc(doc: dict) -> MulticlassSvmModel:
    _check_version(doc)
    return MulticlassSvmModel(
        classes=tuple(int(c) for c in doc["classes"]),
        class_names=tuple(doc["class_names"]),
        models=tuple(binary_svm_from_doc(m) for m in doc["models"]),
        normalization=_normalization_from_doc(doc.get("normalization")),
    )


def gaussian_nb_to_doc(model: GaussianNbModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "model_type": GAUSSIAN_NB,
        "classes": [int(c) for c in model.classes],
        "class_names": list(model.class_names),
        "feature_names": list(model.feature_names),
        "normalization": _normalization_to_doc(model.normalization),
        "priors": _floats(model.priors),
        "means": _float_rows(model.means),
        "variances": _float_rows(model.variances),
    }


def gaussian_nb_from_doc(doc: dict) -> GaussianNbModel:
    _check_version(doc)
    return GaussianNbModel(
        classes=tuple(int(c) for c in doc["classes"]),
        class_names=tuple(doc["class_names"]),
        feature_names=tuple(doc["feature_names"]),
        priors=np.array(doc["priors"], dtype=np.float64),
        means=np.array(doc["means"], dtype=np.float64),
        variances=np.array(doc["variances"], dtype=np.float64),
        normalization=_normalization_from_doc(doc.get("normalization")),
    )


def _check_version(doc: dict) -> None:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {version!r}, expected {FORMAT_VERSION}")


_TO_DOC = {
    BinarySvmModel: binary_svm_to_doc,
    MulticlassSvmModel: multiclass_to_doc,
    GaussianNbModel: gaussian_nb_to_doc,
}
_FROM_DOC = {
    BINARY_SVM: binary_svm_from_doc,
    ONE_VS_ALL_SVM: multiclass_from_doc,
    GAUSSIAN_NB: gaussian_nb_from_doc,
}


def save_model(path, model) -> None:
    to_doc = _TO_DOC.get(type(model))
    if to_doc is None:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    with open(path, "w") as fh:
        json.dump(to_doc(model), fh, indent=2)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        doc = json.load(fh)
    model_type = doc.get("model_type")
    from_doc = _FROM_DOC.get(model_type)
    if from_doc is None:
        raise ValueError(f"unknown model_type {model_type!r}")
    return from_doc(doc)
